#include "jpq/engine.hpp"

#include "jpq/constructor.hpp"
#include "jpq/filter.hpp"
#include "jpq/syntax.hpp"

namespace jpq {

Plan plan_query(const QueryAst& q) {
  Plan p{q, source_term(q), backbone(q.construct), {}};
  if (q.where) validate_condition(*q.where, p.source);
  p.route = infer_route(p.source, p.target);
  return p;
}

Plan plan_query(std::string_view text) { return plan_query(parse_query(text)); }

MatchResult extract(const QueryAst& q, const DocRegistry& docs) {
  Matcher m;
  std::vector<MatchResult> parts;
  for (const auto& s : q.sources) parts.push_back(m.value(s.pattern, docs.get(s.doc)));
  return MatchResult::tuple(std::move(parts));
}

Value execute(const Plan& plan, const DocRegistry& docs) {
  MatchResult r = extract(plan.query, docs);
  std::vector<JoinConstraint> joins;
  if (plan.query.where && r.ok()) {
    Filtered f = filter(r, plan.source, *plan.query.where);
    r = std::move(f.result);
    joins = std::move(f.joins);
  }
  r = resolve_options(r);
  r = transform(r, plan.route, joins);
  return build(plan.query.construct, plan.route.result, r);
}

std::string explain(const Plan& plan) {
  std::string out = "extraction term: " + to_string(plan.source) + "\n";
  out += "construction backbone: " + to_string(plan.target) + "\n";
  out += "route (" + std::to_string(plan.route.steps.size()) + " steps):\n";
  Term t = plan.route.source;
  for (const auto& step : plan.route.steps) {
    t = apply_step(step, t);
    out += "  " + to_string(step) + "  =>  " + to_string(t) + "\n";
  }
  out += "restructured term: " + to_string(plan.route.result) + "\n";
  return out;
}

}  // namespace jpq

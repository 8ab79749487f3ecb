#include "hmlab/neck/schedule.hpp"

#include <cmath>
#include <sstream>

#include "hmlab/core/errors.hpp"

namespace hmlab::neck {

NeckSchedule make_schedule(double lambda_bar, double alpha, double kappa, ScheduleMode mode) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ScheduleError("alpha must lie in (0, 1]");
  if (!(kappa > 0.0 && kappa <= 0.5)) throw ScheduleError("kappa must lie in (0, 1/2]");
  if (!(lambda_bar > 0.0) || !std::isfinite(lambda_bar)) throw ScheduleError("lambda_bar must be positive");

  NeckSchedule s;
  s.alpha = alpha;
  s.kappa = kappa;
  s.a = 72.0 * (1.0 + alpha) / alpha;
  s.lambda_bar = lambda_bar;
  s.rho = 2.0 * lambda_bar;
  s.zeta = std::pow(s.rho, 1.0 / (1.0 + alpha));
  s.rho1 = std::pow(s.zeta, 1.0 + 9.0 * alpha / 16.0);
  s.t0_offset = s.zeta * s.zeta / (kappa * kappa);

  // log form: kappa^a underflows long before the comparison stops making sense.
  const double log_k = std::log(kappa);
  s.base_regime = std::log(lambda_bar) <= s.a * log_k;
  s.admissible = s.rho / kappa <= s.zeta && std::log(s.zeta) <= std::log(2.0) + s.a / (1.0 + alpha) * log_k;

  if (mode == ScheduleMode::strict && !(s.base_regime && s.admissible)) {
    std::ostringstream os;
    os << "lambda_bar=" << lambda_bar << " outside the base regime: needs lambda_bar <= kappa^a = exp("
       << s.a * log_k << ")";
    throw ScheduleError(os.str());
  }
  return s;
}

nlohmann::json to_json(const NeckSchedule& s) {
  return {{"alpha", s.alpha},   {"kappa", s.kappa},         {"a", s.a},
          {"lambda_bar", s.lambda_bar}, {"rho", s.rho},     {"zeta", s.zeta},
          {"rho1", s.rho1},     {"t0_offset", s.t0_offset}, {"base_regime", s.base_regime},
          {"admissible", s.admissible}};
}

}  // namespace hmlab::neck

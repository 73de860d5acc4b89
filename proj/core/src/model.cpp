#include "bbm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bbm {

double OffspringLaw::mean() const {
    double total = 0.0;
    for (const auto& atom : pmf) total += atom.k * atom.prob;
    return total;
}

double OffspringLaw::mean_a_log_a() const {
    double total = 0.0;
    for (const auto& atom : pmf) total += atom.prob * atom.k * std::log(static_cast<double>(atom.k));
    return total;
}

PotentialParams make_params(double beta, double p, OffspringLaw law) {
    PotentialParams params;
    params.beta = beta;
    params.p = p;
    params.m = law.mean();
    params.offspring = std::move(law);
    return params;
}

PotentialParams validate(const PotentialParams& params) {
    auto fail = [](const std::string& what) { throw DomainError(what); };

    if (!std::isfinite(params.p) || params.p < 0.0 || params.p >= 2.0) {
        std::ostringstream os;
        os << "p out of [0,2): p = " << params.p;
        fail(os.str());
    }
    if (!std::isfinite(params.beta) || params.beta <= 0.0) fail("beta must be positive");
    if (params.offspring.pmf.empty()) fail("offspring law is empty");

    double total = 0.0;
    for (const auto& atom : params.offspring.pmf) {
        if (atom.k < 1) fail("offspring support must be >= 1");
        if (!(atom.prob >= 0.0 && atom.prob <= 1.0)) fail("offspring probability outside [0,1]");
        total += atom.prob;
    }
    if (std::abs(total - 1.0) > 1e-12) fail("offspring probabilities do not sum to 1");

    if (!std::isfinite(params.m) || params.m < 1.0) fail("m must be >= 1");
    const double law_mean = params.offspring.mean();
    if (std::abs(law_mean - params.m) > 1e-12 * std::max(1.0, params.m)) {
        std::ostringstream os;
        os << "mean mismatch: m = " << params.m << " but E[A] = " << law_mean;
        fail(os.str());
    }

    // 2q - 1 and (2+p)/(2-p) are the same number computed two ways.
    if (2.0 * params.q() - 1.0 != params.growth_exponent()) {
        const double diff = std::abs(2.0 * params.q() - 1.0 - params.growth_exponent());
        if (diff > 4.0 * std::numeric_limits<double>::epsilon() * params.growth_exponent())
            fail("inconsistent growth exponent");
    }
    return params;
}

double abs_pow(double x, double p) {
    if (p == 0.0) return 1.0;
    if (p == 1.0) return std::abs(x);
    return std::pow(std::abs(x), p);
}

double branch_rate(const PotentialParams& params, double x) {
    return params.beta * abs_pow(x, params.p);
}

}  // namespace bbm

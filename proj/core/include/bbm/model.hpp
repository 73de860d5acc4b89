#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bbm {

/// Thrown when model parameters or operation inputs violate a documented
/// invariant. The message names the violated invariant.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct OffspringAtom {
    int k = 1;          // number of extra offspring A
    double prob = 1.0;
};

/// Law of the offspring increment A on {1, 2, ...} with finite support.
/// A branching event replaces a particle by 1 + A particles.
struct OffspringLaw {
    std::vector<OffspringAtom> pmf{{1, 1.0}};

    static OffspringLaw binary() { return {}; }
    static OffspringLaw constant(int k) { return OffspringLaw{{{k, 1.0}}}; }

    double mean() const;
    /// E[A log A]; always finite for finite support.
    double mean_a_log_a() const;
};

/// Constants of the branching Brownian motion with breeding rate beta |x|^p.
struct PotentialParams {
    double beta = 1.0;
    double p = 1.0;
    double m = 1.0;
    OffspringLaw offspring{};

    /// beta * m, the only combination entering the growth rates.
    double m_beta() const { return m * beta; }
    /// Space exponent q = 2 / (2 - p).
    double q() const { return 2.0 / (2.0 - p); }
    /// Growth exponent (2 + p) / (2 - p) = 2q - 1.
    double growth_exponent() const { return (2.0 + p) / (2.0 - p); }
};

/// Builds params with m taken from the offspring law.
PotentialParams make_params(double beta, double p, OffspringLaw law = OffspringLaw::binary());

/// Returns params unchanged iff every invariant holds, otherwise throws
/// DomainError naming the first violated invariant.
PotentialParams validate(const PotentialParams& params);

/// beta |x|^p with |x|^0 == 1 everywhere, including x = 0.
double branch_rate(const PotentialParams& params, double x);

/// |x|^p with the same p = 0 convention.
double abs_pow(double x, double p);

}  // namespace bbm

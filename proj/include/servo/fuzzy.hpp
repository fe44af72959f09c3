#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace servo {

/// Triangular membership function with breakpoints a <= b <= c.
/// Degenerate a == b or b == c edges (shoulders) are handled without
/// division by zero.
struct TriangularMF {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    void validate() const;
};

/// Membership degree in [0,1]: 1 at x = b, 0 outside (a, c), piecewise
/// linear in between.
double mf_eval(const TriangularMF& mf, double x);

/// A named input with its universe of discourse and an ordered MF family.
struct LinguisticVariable {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<TriangularMF> mfs;

    void validate() const;
    /// Clamps x to [lo, hi]; out-of-universe inputs evaluate at the boundary.
    double clamp(double x) const;
    /// Membership degrees of the clamped input for every MF, in order.
    void degrees(double x, std::vector<double>& out) const;
};

/// Builds `count` triangles with uniformly spaced peaks, end MFs
/// shouldered at the universe boundary. The family is a partition of
/// unity on [lo, hi]. Throws for count < 2 or lo >= hi.
LinguisticVariable uniform_partition(std::string name, double lo, double hi, int count);

/// One if-then rule: an MF index per input variable and the index of the
/// theta entry it drives.
struct Rule {
    std::vector<std::size_t> antecedent;
    std::size_t consequent = 0;
};

/// A rule set over a fixed list of input variables. Construction checks
/// index validity and (for non-grid bases) that some rule fires at every
/// probed point of the input product space.
class RuleBase {
  public:
    RuleBase(std::vector<LinguisticVariable> input_vars, std::vector<Rule> rules,
             std::size_t theta_dim);

    /// One rule per antecedent combination, consequent index = rule index,
    /// so theta dimension = rule count and a rule fires everywhere.
    static RuleBase complete_grid(std::vector<LinguisticVariable> input_vars);

    /// Complete antecedent grid whose rules share `n_centers` consequent
    /// entries, assigned diagonally: rules with a larger antecedent index
    /// sum map to a larger center index. Theta dimension = n_centers.
    static RuleBase complete_grid_shared(std::vector<LinguisticVariable> input_vars,
                                         std::size_t n_centers);

    const std::vector<LinguisticVariable>& input_vars() const { return input_vars_; }
    const std::vector<Rule>& rules() const { return rules_; }
    std::size_t theta_dim() const { return theta_dim_; }
    bool is_complete_grid() const { return grid_; }

  private:
    RuleBase() = default;

    std::vector<LinguisticVariable> input_vars_;
    std::vector<Rule> rules_;
    std::size_t theta_dim_ = 0;
    bool grid_ = false;

    void check_coverage() const;
};

/// Product-inference, center-average basis: entry l is
/// prod_i mu_{A_i^l}(x_i) normalized by the total firing strength.
/// Entries are >= 0 and sum to 1. Inputs are clamped to each variable's
/// universe. Throws if the total firing strength is zero.
void fuzzy_basis(std::span<const double> inputs, const RuleBase& rule_base,
                 std::vector<double>& basis);
std::vector<double> fuzzy_basis(std::span<const double> inputs, const RuleBase& rule_base);

/// Adjustable consequent centers with per-entry projection bounds.
struct ThetaVector {
    std::vector<double> values;
    std::vector<double> lo;
    std::vector<double> hi;

    static ThetaVector uniform(std::size_t dim, double value, double lo, double hi);

    std::size_t size() const { return values.size(); }
    void validate() const;
    /// Clamps every entry to its [lo, hi] bound.
    void project();
    double norm() const;
};

/// theta^T basis. Throws on dimension mismatch.
double approximate(const ThetaVector& theta, std::span<const double> basis);

}  // namespace servo

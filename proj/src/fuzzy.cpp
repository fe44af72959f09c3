#include "servo/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace servo {

void TriangularMF::validate() const {
    if (!(a <= b && b <= c)) throw std::invalid_argument("TriangularMF: a <= b <= c violated");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
        throw std::invalid_argument("TriangularMF: non-finite breakpoint");
}

double mf_eval(const TriangularMF& mf, double x) {
    if (x == mf.b) return 1.0;
    if (x <= mf.a || x >= mf.c) return 0.0;
    if (x < mf.b) return (x - mf.a) / (mf.b - mf.a);
    return (mf.c - x) / (mf.c - mf.b);
}

void LinguisticVariable::validate() const {
    if (!(lo < hi)) throw std::invalid_argument("LinguisticVariable: lo < hi violated");
    if (mfs.empty()) throw std::invalid_argument("LinguisticVariable: no membership functions");
    for (const auto& mf : mfs) {
        mf.validate();
        if (mf.c < lo || mf.a > hi)
            throw std::invalid_argument("LinguisticVariable: MF support outside the universe");
    }
}

double LinguisticVariable::clamp(double x) const {
    return std::clamp(x, lo, hi);
}

void LinguisticVariable::degrees(double x, std::vector<double>& out) const {
    const double xc = clamp(x);
    out.resize(mfs.size());
    for (std::size_t i = 0; i < mfs.size(); ++i) out[i] = mf_eval(mfs[i], xc);
}

LinguisticVariable uniform_partition(std::string name, double lo, double hi, int count) {
    if (count < 2) throw std::invalid_argument("uniform_partition: count < 2");
    if (!(lo < hi)) throw std::invalid_argument("uniform_partition: lo < hi violated");

    LinguisticVariable var;
    var.name = std::move(name);
    var.lo = lo;
    var.hi = hi;
    const double h = (hi - lo) / static_cast<double>(count - 1);

    // Peaks are computed once and the ends pinned exactly; neighbouring MFs
    // then share breakpoints, which keeps the pairwise sum at exactly 1 and
    // avoids the last peak rounding past hi.
    std::vector<double> peaks(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) peaks[static_cast<std::size_t>(i)] = lo + h * i;
    peaks.front() = lo;
    peaks.back() = hi;
    for (std::size_t i = 1; i < peaks.size(); ++i)
        if (!(peaks[i - 1] < peaks[i]))
            throw std::invalid_argument("uniform_partition: universe too narrow for count");

    var.mfs.reserve(peaks.size());
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        const double left = (i == 0) ? lo : peaks[i - 1];
        const double right = (i + 1 == peaks.size()) ? hi : peaks[i + 1];
        var.mfs.push_back({left, peaks[i], right});
    }
    var.validate();
    return var;
}

RuleBase::RuleBase(std::vector<LinguisticVariable> input_vars, std::vector<Rule> rules,
                   std::size_t theta_dim)
    : input_vars_(std::move(input_vars)), rules_(std::move(rules)), theta_dim_(theta_dim) {
    if (input_vars_.empty()) throw std::invalid_argument("RuleBase: no input variables");
    if (rules_.empty()) throw std::invalid_argument("RuleBase: no rules");
    for (const auto& var : input_vars_) var.validate();
    for (const auto& rule : rules_) {
        if (rule.antecedent.size() != input_vars_.size())
            throw std::invalid_argument("RuleBase: antecedent arity mismatch");
        for (std::size_t i = 0; i < rule.antecedent.size(); ++i)
            if (rule.antecedent[i] >= input_vars_[i].mfs.size())
                throw std::invalid_argument("RuleBase: antecedent MF index out of range");
        if (rule.consequent >= theta_dim_)
            throw std::invalid_argument("RuleBase: consequent index out of range");
    }
    check_coverage();
}

RuleBase RuleBase::complete_grid(std::vector<LinguisticVariable> input_vars) {
    if (input_vars.empty()) throw std::invalid_argument("RuleBase: no input variables");
    for (const auto& var : input_vars) var.validate();

    std::size_t count = 1;
    for (const auto& var : input_vars) count *= var.mfs.size();

    std::vector<Rule> rules;
    rules.reserve(count);
    std::vector<std::size_t> idx(input_vars.size(), 0);
    for (std::size_t r = 0; r < count; ++r) {
        rules.push_back({idx, r});
        for (std::size_t i = input_vars.size(); i-- > 0;) {
            if (++idx[i] < input_vars[i].mfs.size()) break;
            idx[i] = 0;
        }
    }

    RuleBase rb;
    rb.input_vars_ = std::move(input_vars);
    rb.rules_ = std::move(rules);
    rb.theta_dim_ = count;
    rb.grid_ = true;
    return rb;
}

RuleBase RuleBase::complete_grid_shared(std::vector<LinguisticVariable> input_vars,
                                        std::size_t n_centers) {
    if (n_centers < 1) throw std::invalid_argument("RuleBase: n_centers < 1");
    RuleBase rb = complete_grid(std::move(input_vars));
    std::size_t span = 0;
    for (const auto& var : rb.input_vars_) span += var.mfs.size() - 1;
    for (auto& rule : rb.rules_) {
        std::size_t s = 0;
        for (std::size_t idx : rule.antecedent) s += idx;
        rule.consequent =
            (span == 0) ? 0
                        : static_cast<std::size_t>(std::llround(
                              static_cast<double>(s) * static_cast<double>(n_centers - 1) /
                              static_cast<double>(span)));
    }
    rb.theta_dim_ = n_centers;
    return rb;
}

void RuleBase::check_coverage() const {
    // Probe the product of each variable's breakpoints and inter-peak
    // midpoints; memberships are piecewise linear so holes show up there.
    std::vector<std::vector<double>> probes(input_vars_.size());
    std::size_t total = 1;
    for (std::size_t i = 0; i < input_vars_.size(); ++i) {
        const auto& var = input_vars_[i];
        auto& p = probes[i];
        p.push_back(var.lo);
        p.push_back(var.hi);
        for (const auto& mf : var.mfs) {
            for (double x : {mf.a, mf.b, mf.c})
                if (x >= var.lo && x <= var.hi) p.push_back(x);
        }
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
        std::vector<double> mids;
        for (std::size_t k = 0; k + 1 < p.size(); ++k) mids.push_back(0.5 * (p[k] + p[k + 1]));
        p.insert(p.end(), mids.begin(), mids.end());
        total *= p.size();
        if (total > 200000)
            throw std::invalid_argument("RuleBase: coverage check too large; use complete_grid");
    }

    std::vector<std::size_t> idx(input_vars_.size(), 0);
    std::vector<double> point(input_vars_.size());
    std::vector<double> basis;
    for (std::size_t n = 0; n < total; ++n) {
        for (std::size_t i = 0; i < point.size(); ++i) point[i] = probes[i][idx[i]];
        double strength = 0.0;
        for (const auto& rule : rules_) {
            double w = 1.0;
            for (std::size_t i = 0; i < point.size(); ++i)
                w *= mf_eval(input_vars_[i].mfs[rule.antecedent[i]], point[i]);
            strength += w;
        }
        if (strength <= 0.0)
            throw std::invalid_argument("RuleBase: no rule fires at some point of the universe");
        for (std::size_t i = idx.size(); i-- > 0;) {
            if (++idx[i] < probes[i].size()) break;
            idx[i] = 0;
        }
    }
}

void fuzzy_basis(std::span<const double> inputs, const RuleBase& rule_base,
                 std::vector<double>& basis) {
    const auto& vars = rule_base.input_vars();
    if (inputs.size() != vars.size())
        throw std::invalid_argument("fuzzy_basis: input arity mismatch");

    thread_local std::vector<std::vector<double>> mu;
    mu.resize(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) vars[i].degrees(inputs[i], mu[i]);

    basis.assign(rule_base.theta_dim(), 0.0);
    double total = 0.0;
    for (std::size_t r = 0; r < rule_base.rules().size(); ++r) {
        const auto& rule = rule_base.rules()[r];
        double w = 1.0;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            w *= mu[i][rule.antecedent[i]];
            if (w == 0.0) break;
        }
        basis[rule.consequent] += w;
        total += w;
    }
    if (total <= 0.0) throw std::domain_error("fuzzy_basis: total firing strength is zero");
    for (double& b : basis) b /= total;
}

std::vector<double> fuzzy_basis(std::span<const double> inputs, const RuleBase& rule_base) {
    std::vector<double> basis;
    fuzzy_basis(inputs, rule_base, basis);
    return basis;
}

ThetaVector ThetaVector::uniform(std::size_t dim, double value, double lo, double hi) {
    ThetaVector t;
    t.values.assign(dim, value);
    t.lo.assign(dim, lo);
    t.hi.assign(dim, hi);
    t.validate();
    return t;
}

void ThetaVector::validate() const {
    if (values.size() != lo.size() || values.size() != hi.size())
        throw std::invalid_argument("ThetaVector: bounds size mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!(lo[i] <= values[i] && values[i] <= hi[i]))
            throw std::invalid_argument("ThetaVector: entry outside its bounds");
}

void ThetaVector::project() {
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = std::clamp(values[i], lo[i], hi[i]);
}

double ThetaVector::norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

double approximate(const ThetaVector& theta, std::span<const double> basis) {
    if (theta.size() != basis.size())
        throw std::invalid_argument("approximate: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) s += theta.values[i] * basis[i];
    return s;
}

}  // namespace servo

#include "tssid/sindy/library.hpp"

#include <algorithm>
#include <cmath>

#include "tssid/error.hpp"

namespace tssid::sindy {

namespace {

const char* superscript(int p) {
    static const char* const kSup[] = {"", "", "²", "³", "⁴", "⁵"};
    return kSup[p];
}

// Exponent vectors over `n` variables with total degree exactly `degree`,
// first variable's exponent descending (x², x·y, y²).
void monomials(std::size_t n, int degree, std::vector<int>& current, std::vector<std::vector<int>>& out) {
    if (current.size() + 1 == n) {
        current.push_back(degree);
        out.push_back(current);
        current.pop_back();
        return;
    }
    for (int e = degree; e >= 0; --e) {
        current.push_back(e);
        monomials(n, degree - e, current, out);
        current.pop_back();
    }
}

std::vector<std::vector<int>> monomials(std::size_t n, int degree) {
    std::vector<std::vector<int>> out;
    if (n == 0) return out;
    std::vector<int> current;
    monomials(n, degree, current, out);
    return out;
}

std::vector<Factor> power_factors(const std::vector<int>& exponents, std::size_t offset) {
    std::vector<Factor> f;
    for (std::size_t k = 0; k < exponents.size(); ++k) {
        if (exponents[k] > 0) f.push_back({offset + k, Factor::Kind::Power, exponents[k]});
    }
    return f;
}

}  // namespace

void LibrarySpec::validate() const {
    if (polynomial_degree < 1 || polynomial_degree > kMaxDegree) {
        throw Error(ErrorCode::DegreeTooHigh,
                    "polynomial degree " + std::to_string(polynomial_degree) + " outside [1, 5]");
    }
}

CandidateLibrary::CandidateLibrary(LibrarySpec spec, std::vector<std::string> state_names,
                                   std::vector<std::string> input_names)
    : spec_(spec), state_names_(std::move(state_names)), input_names_(std::move(input_names)) {
    spec_.validate();
    const std::size_t ns = state_names_.size();
    const std::size_t ni = input_names_.size();
    std::vector<std::string> names = state_names_;
    names.insert(names.end(), input_names_.begin(), input_names_.end());

    auto label_of = [&](const std::vector<Factor>& factors) {
        if (factors.empty()) return std::string("1");
        std::string s;
        for (std::size_t k = 0; k < factors.size(); ++k) {
            if (k) s += "·";
            const auto& f = factors[k];
            switch (f.kind) {
                case Factor::Kind::Power: s += names[f.variable] + superscript(f.exponent); break;
                case Factor::Kind::Sin: s += "sin(" + names[f.variable] + ")"; break;
                case Factor::Kind::Cos: s += "cos(" + names[f.variable] + ")"; break;
            }
        }
        return s;
    };
    auto add = [&](std::vector<Factor> factors) {
        std::string label = label_of(factors);
        terms_.push_back({std::move(factors), std::move(label)});
    };

    if (spec_.include_bias) add({});
    for (int d = 1; d <= spec_.polynomial_degree; ++d) {
        for (const auto& e : monomials(ns, d)) add(power_factors(e, 0));
    }
    for (int d = 1; d <= spec_.polynomial_degree; ++d) {
        for (const auto& e : monomials(ni, d)) add(power_factors(e, ns));
    }
    if (spec_.include_cross_terms && ns > 0 && ni > 0) {
        for (int total = 2; total <= spec_.polynomial_degree; ++total) {
            for (int ds = total - 1; ds >= 1; --ds) {
                for (const auto& es : monomials(ns, ds)) {
                    for (const auto& eu : monomials(ni, total - ds)) {
                        auto f = power_factors(es, 0);
                        auto g = power_factors(eu, ns);
                        f.insert(f.end(), g.begin(), g.end());
                        add(std::move(f));
                    }
                }
            }
        }
    }
    if (spec_.include_trig) {
        for (std::size_t v = 0; v < ns + ni; ++v) {
            add({{v, Factor::Kind::Sin, 1}});
            add({{v, Factor::Kind::Cos, 1}});
        }
        for (std::size_t s = 0; s < ns; ++s) {
            for (std::size_t i = 0; i < ni; ++i) {
                add({{s, Factor::Kind::Sin, 1}, {ns + i, Factor::Kind::Sin, 1}});
                add({{s, Factor::Kind::Cos, 1}, {ns + i, Factor::Kind::Cos, 1}});
            }
        }
    }
}

std::vector<std::string> CandidateLibrary::labels() const {
    std::vector<std::string> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back(t.label);
    return out;
}

int CandidateLibrary::find(std::string_view label) const {
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        if (terms_[k].label == label) return static_cast<int>(k);
    }
    return -1;
}

void CandidateLibrary::evaluate(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& u,
                                Eigen::Ref<Eigen::VectorXd> out) const {
    const auto ns = static_cast<std::size_t>(x.size());
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        double value = 1.0;
        for (const auto& f : terms_[k].factors) {
            const double v = f.variable < ns ? x(static_cast<Eigen::Index>(f.variable))
                                             : u(static_cast<Eigen::Index>(f.variable - ns));
            switch (f.kind) {
                case Factor::Kind::Power: {
                    double p = v;
                    for (int e = 1; e < f.exponent; ++e) p *= v;
                    value *= p;
                    break;
                }
                case Factor::Kind::Sin: value *= std::sin(v); break;
                case Factor::Kind::Cos: value *= std::cos(v); break;
            }
        }
        out(static_cast<Eigen::Index>(k)) = value;
    }
}

DesignMatrix build_library(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U, const LibrarySpec& spec,
                           std::vector<std::string> state_names, std::vector<std::string> input_names) {
    if (X.rows() != U.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "state and input snapshot counts differ");
    }
    if (state_names.empty()) {
        for (Eigen::Index k = 0; k < X.cols(); ++k) state_names.push_back(X.cols() == 1 ? "x" : "x" + std::to_string(k + 1));
    }
    if (input_names.empty()) {
        for (Eigen::Index k = 0; k < U.cols(); ++k) input_names.push_back(U.cols() == 1 ? "u" : "u" + std::to_string(k + 1));
    }
    if (static_cast<Eigen::Index>(state_names.size()) != X.cols() ||
        static_cast<Eigen::Index>(input_names.size()) != U.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "variable name count does not match snapshot columns");
    }
    const CandidateLibrary lib(spec, std::move(state_names), std::move(input_names));
    DesignMatrix dm{Eigen::MatrixXd(X.rows(), static_cast<Eigen::Index>(lib.size())), lib.labels()};
    Eigen::VectorXd row(static_cast<Eigen::Index>(lib.size()));
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
        lib.evaluate(X.row(r).transpose(), U.row(r).transpose(), row);
        dm.values.row(r) = row.transpose();
    }
    return dm;
}

nlohmann::json to_json(const LibrarySpec& spec) {
    return {{"polynomial_degree", spec.polynomial_degree},
            {"include_cross_terms", spec.include_cross_terms},
            {"include_trig", spec.include_trig},
            {"include_bias", spec.include_bias}};
}

LibrarySpec library_spec_from_json(const nlohmann::json& j, LibrarySpec base) {
    try {
        base.polynomial_degree = j.value("polynomial_degree", base.polynomial_degree);
        base.include_cross_terms = j.value("include_cross_terms", base.include_cross_terms);
        base.include_trig = j.value("include_trig", base.include_trig);
        base.include_bias = j.value("include_bias", base.include_bias);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("library block: ") + e.what());
    }
    return base;
}

}  // namespace tssid::sindy

#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace tssid::sindy {

struct LibrarySpec {
    int polynomial_degree = 2;
    bool include_cross_terms = true;
    bool include_trig = false;
    bool include_bias = true;

    static constexpr int kMaxDegree = 5;
    /// Throws DegreeTooHigh outside [1, kMaxDegree].
    void validate() const;
    bool operator==(const LibrarySpec&) const = default;
};

/// One multiplicative factor of a candidate term.
struct Factor {
    enum class Kind { Power, Sin, Cos };
    std::size_t variable = 0;  // index into state variables, then input variables
    Kind kind = Kind::Power;
    int exponent = 1;
};

/// Product of factors; the empty product is the bias term "1".
struct Term {
    std::vector<Factor> factors;
    std::string label;
};

/// Candidate functions of state and input variables, enumerated in a fixed
/// canonical order:
///   bias, state monomials (by degree, then lexicographic), input monomials,
///   cross monomials (by total degree, higher state degree first), then
///   sin/cos of every state and input variable followed by the products
///   sin(x)·sin(u) and cos(x)·cos(u).
class CandidateLibrary {
public:
    CandidateLibrary(LibrarySpec spec, std::vector<std::string> state_names, std::vector<std::string> input_names);

    const LibrarySpec& spec() const { return spec_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::vector<std::string> labels() const;
    std::size_t size() const { return terms_.size(); }
    std::size_t num_states() const { return state_names_.size(); }
    std::size_t num_inputs() const { return input_names_.size(); }

    /// Index of the term with `label`, or -1.
    int find(std::string_view label) const;

    /// Row of candidate values for one snapshot.
    void evaluate(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& u,
                  Eigen::Ref<Eigen::VectorXd> out) const;

private:
    LibrarySpec spec_;
    std::vector<std::string> state_names_;
    std::vector<std::string> input_names_;
    std::vector<Term> terms_;
};

struct DesignMatrix {
    Eigen::MatrixXd values;  // snapshots x terms
    std::vector<std::string> labels;
};

/// Evaluates the library on snapshot matrices X (m x states) and U (m x inputs).
DesignMatrix build_library(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U, const LibrarySpec& spec,
                           std::vector<std::string> state_names = {}, std::vector<std::string> input_names = {});

nlohmann::json to_json(const LibrarySpec& spec);
LibrarySpec library_spec_from_json(const nlohmann::json& j, LibrarySpec base = {});

}  // namespace tssid::sindy

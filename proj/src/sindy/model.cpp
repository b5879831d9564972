#include "tssid/sindy/model.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "tssid/error.hpp"
#include "tssid/numeric/rk4.hpp"

namespace tssid::sindy {

using flightdata::FlightRecord;
using flightdata::ManeuverSegment;

void SINDyConfig::validate() const {
    if (!(threshold > 0.0)) throw Error(ErrorCode::ConfigError, "SINDy threshold must be > 0");
    if (max_stlsq_iterations < 1) throw Error(ErrorCode::ConfigError, "max_stlsq_iterations must be >= 1");
    if (ridge_lambda < 0.0) throw Error(ErrorCode::ConfigError, "ridge_lambda must be >= 0");
    library.validate();
}

nlohmann::json to_json(const SINDyConfig& cfg) {
    return {{"threshold", cfg.threshold},
            {"max_stlsq_iterations", cfg.max_stlsq_iterations},
            {"ridge_lambda", cfg.ridge_lambda},
            {"derivative_method", to_string(cfg.derivative_method)},
            {"library", to_json(cfg.library)},
            {"state_channel", cfg.state_channel},
            {"control_channel", cfg.control_channel}};
}

SINDyConfig sindy_config_from_json(const nlohmann::json& j, SINDyConfig base) {
    try {
        base.threshold = j.value("threshold", base.threshold);
        base.max_stlsq_iterations = j.value("max_stlsq_iterations", base.max_stlsq_iterations);
        base.ridge_lambda = j.value("ridge_lambda", base.ridge_lambda);
        if (j.contains("derivative_method")) {
            base.derivative_method = derivative_method_from_string(j.at("derivative_method").get<std::string>());
        }
        if (j.contains("library")) base.library = library_spec_from_json(j.at("library"), base.library);
        base.state_channel = j.value("state_channel", base.state_channel);
        base.control_channel = j.value("control_channel", base.control_channel);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ConfigError, std::string("sindy block: ") + e.what());
    }
    return base;
}

double SparseModel::coefficient(std::size_t equation, std::string_view label) const {
    for (std::size_t k = 0; k < term_labels.size(); ++k) {
        if (term_labels[k] == label) {
            return coefficients(static_cast<Eigen::Index>(equation), static_cast<Eigen::Index>(k));
        }
    }
    return 0.0;
}

namespace {

std::vector<double> slice(std::span<const double> s, const ManeuverSegment& seg) {
    return {s.begin() + static_cast<long>(seg.start_index), s.begin() + static_cast<long>(seg.end_index)};
}

struct SnapshotBuilder {
    std::vector<std::vector<double>> x_cols, u_cols, t_cols;
    std::vector<std::size_t> offsets;
    std::size_t rows = 0;

    explicit SnapshotBuilder(std::size_t nx, std::size_t nu, std::size_t nt) : x_cols(nx), u_cols(nu), t_cols(nt) {}

    void append(const std::vector<const std::vector<double>*>& xs, const std::vector<const std::vector<double>*>& us,
                const std::vector<const std::vector<double>*>& ts) {
        offsets.push_back(rows);
        for (std::size_t k = 0; k < xs.size(); ++k) x_cols[k].insert(x_cols[k].end(), xs[k]->begin(), xs[k]->end());
        for (std::size_t k = 0; k < us.size(); ++k) u_cols[k].insert(u_cols[k].end(), us[k]->begin(), us[k]->end());
        for (std::size_t k = 0; k < ts.size(); ++k) t_cols[k].insert(t_cols[k].end(), ts[k]->begin(), ts[k]->end());
        rows += xs.front()->size();
    }

    static Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& cols, std::size_t rows) {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t k = 0; k < cols.size(); ++k) {
            m.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXd>(cols[k].data(), static_cast<Eigen::Index>(rows));
        }
        return m;
    }

    Snapshots finish() const {
        if (rows == 0) throw Error(ErrorCode::NoSegments, "no active maneuver segments to fit");
        return {to_matrix(x_cols, rows), to_matrix(u_cols, rows), to_matrix(t_cols, rows), offsets};
    }
};

double rmse(const Eigen::VectorXd& r) { return std::sqrt(r.squaredNorm() / static_cast<double>(r.size())); }

}  // namespace

Snapshots first_order_snapshots(std::span<const FlightRecord> flights, const SINDyConfig& config) {
    SnapshotBuilder builder(1, 1, 1);
    for (const auto& flight : flights) {
        const auto trq = flight.samples(config.state_channel);
        const auto wf = flight.samples(config.control_channel);
        for (const auto& seg : flight.active_maneuvers()) {
            if (seg.length() < 3) {
                throw Error(ErrorCode::SeriesTooShort,
                            flight.flight_id() + "/" + seg.label + ": segment shorter than 3 samples");
            }
            const auto x = slice(trq, seg);
            const auto u = slice(wf, seg);
            const auto dx = differentiate(x, flight.dt(), config.derivative_method);
            builder.append({&x}, {&u}, {&dx});
        }
    }
    return builder.finish();
}

Snapshots augment_second_order(std::span<const FlightRecord> flights, const SINDyConfig& config) {
    SnapshotBuilder builder(2, 2, 1);
    for (const auto& flight : flights) {
        const auto trq = flight.samples(config.state_channel);
        const auto wf = flight.samples(config.control_channel);
        for (const auto& seg : flight.active_maneuvers()) {
            if (seg.length() < 5) {
                throw Error(ErrorCode::SeriesTooShort,
                            flight.flight_id() + "/" + seg.label + ": second-order fit needs >= 5 samples per segment");
            }
            const auto x = slice(trq, seg);
            const auto u = slice(wf, seg);
            const auto dx = differentiate(x, flight.dt(), config.derivative_method);
            const auto ddx = differentiate(dx, flight.dt(), config.derivative_method);
            const auto du = differentiate(u, flight.dt(), config.derivative_method);
            builder.append({&x, &dx}, {&u, &du}, {&ddx});
        }
    }
    return builder.finish();
}

namespace {

SparseModel regress(ModelOrder order, std::vector<std::string> states, std::vector<std::string> inputs,
                    const Snapshots& snaps, const SINDyConfig& config) {
    const CandidateLibrary lib(config.library, states, inputs);
    const DesignMatrix theta = build_library(snaps.X, snaps.U, config.library, states, inputs);
    const StlsqResult fit = stlsq(theta.values, snaps.targets, config.stlsq_options());

    SparseModel model;
    model.order = order;
    model.state_names = std::move(states);
    model.input_names = std::move(inputs);
    model.library = config.library;
    model.term_labels = theta.labels;
    model.column_scale = fit.column_scale;
    model.threshold = config.threshold;
    const auto p = static_cast<Eigen::Index>(theta.labels.size());
    if (order == ModelOrder::First) {
        model.coefficients = fit.coefficients;
        model.residual_rmse = {rmse(theta.values * fit.coefficients.row(0).transpose() - snaps.targets.col(0))};
    } else {
        model.coefficients = Eigen::MatrixXd::Zero(2, p);
        const int identity = lib.find(model.state_names[1]);
        model.coefficients(0, identity) = 1.0;
        model.coefficients.row(1) = fit.coefficients.row(0);
        model.residual_rmse = {0.0, rmse(theta.values * fit.coefficients.row(0).transpose() - snaps.targets.col(0))};
    }
    return model;
}

}  // namespace

SparseModel fit_first_order(std::span<const FlightRecord> flights, const SINDyConfig& config) {
    config.validate();
    const Snapshots snaps = first_order_snapshots(flights, config);
    return regress(ModelOrder::First, {config.state_channel}, {config.control_channel}, snaps, config);
}

SparseModel fit_second_order(std::span<const FlightRecord> flights, const SINDyConfig& config) {
    config.validate();
    const Snapshots snaps = augment_second_order(flights, config);
    return regress(ModelOrder::Second, {config.state_channel, config.state_channel + "'"},
                   {config.control_channel, config.control_channel + "'"}, snaps, config);
}

Eigen::MatrixXd simulate(const SparseModel& model, const Eigen::MatrixXd& inputs, double x0,
                         std::optional<double> xdot0, double dt) {
    if (inputs.rows() != static_cast<Eigen::Index>(model.input_names.size())) {
        throw Error(ErrorCode::DimensionMismatch, "simulation needs " + std::to_string(model.input_names.size()) +
                                                      " input rows, got " + std::to_string(inputs.rows()));
    }
    if (inputs.cols() < 2) throw Error(ErrorCode::SeriesTooShort, "simulation needs at least 2 input samples");
    if (!(dt > 0.0)) throw Error(ErrorCode::ConfigError, "dt must be positive");
    Eigen::VectorXd init(static_cast<Eigen::Index>(model.state_names.size()));
    init(0) = x0;
    if (model.order == ModelOrder::Second) {
        if (!xdot0) throw Error(ErrorCode::MissingInitialDerivative, "second-order simulation needs an initial TRQ'");
        init(1) = *xdot0;
    }
    const CandidateLibrary lib = model.candidate_library();
    Eigen::VectorXd theta(static_cast<Eigen::Index>(lib.size()));
    auto rhs = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& u) -> Eigen::VectorXd {
        lib.evaluate(x, u, theta);
        return model.coefficients * theta;
    };
    return numeric::integrate_rk4(rhs, init, inputs, dt);
}

Eigen::MatrixXd maneuver_inputs(const SparseModel& model, std::span<const double> wf, double dt,
                                DerivativeMethod method) {
    Eigen::MatrixXd inputs(static_cast<Eigen::Index>(model.input_names.size()), static_cast<Eigen::Index>(wf.size()));
    inputs.row(0) = Eigen::Map<const Eigen::RowVectorXd>(wf.data(), static_cast<Eigen::Index>(wf.size()));
    if (model.order == ModelOrder::Second) {
        const auto dwf = differentiate(wf, dt, method);
        inputs.row(1) = Eigen::Map<const Eigen::RowVectorXd>(dwf.data(), static_cast<Eigen::Index>(dwf.size()));
    }
    return inputs;
}

std::vector<double> simulate_maneuver(const SparseModel& model, const FlightRecord& flight,
                                      const ManeuverSegment& segment, DerivativeMethod method) {
    const auto trq = slice(flight.samples(model.state_names[0]), segment);
    const auto wf = slice(flight.samples(model.input_names[0]), segment);
    if (trq.size() < 3) throw Error(ErrorCode::SeriesTooShort, "maneuver shorter than 3 samples");
    std::optional<double> xdot0;
    if (model.order == ModelOrder::Second) xdot0 = differentiate(trq, flight.dt(), method).front();
    const Eigen::MatrixXd states = simulate(model, maneuver_inputs(model, wf, flight.dt(), method), trq.front(), xdot0,
                                            flight.dt());
    std::vector<double> out(trq.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = states(0, static_cast<Eigen::Index>(i));
    return out;
}

std::vector<double> predict_flight(const SparseModel& model, const FlightRecord& flight, DerivativeMethod method) {
    std::vector<double> out(flight.length(), std::numeric_limits<double>::quiet_NaN());
    for (const auto& seg : flight.active_maneuvers()) {
        const auto sim = simulate_maneuver(model, flight, seg, method);
        std::copy(sim.begin(), sim.end(), out.begin() + static_cast<long>(seg.start_index));
    }
    return out;
}

std::vector<double> reduction_residual(const SparseModel& model, const Eigen::MatrixXd& inputs, double x0,
                                       double xdot0, double dt) {
    if (model.order != ModelOrder::Second) {
        throw Error(ErrorCode::DimensionMismatch, "reduction residual applies to second-order models");
    }
    const Eigen::MatrixXd traj = simulate(model, inputs, x0, xdot0, dt);

    const CandidateLibrary lib = model.candidate_library();
    const auto p = static_cast<Eigen::Index>(lib.size());
    const int i_dstate = lib.find(model.state_names[1]);
    const int i_dinput = lib.find(model.input_names[1]);
    const Eigen::RowVectorXd xi = model.coefficients.row(1);
    const double b_prime = i_dstate >= 0 ? xi(i_dstate) : 0.0;
    const double c_prime = i_dinput >= 0 ? xi(i_dinput) : 0.0;

    // Augmented state: [TRQ, TRQ', Q_1..Q_p, W].
    Eigen::VectorXd theta(p);
    auto rhs = [&](const Eigen::VectorXd& z, const Eigen::VectorXd& u) -> Eigen::VectorXd {
        Eigen::VectorXd dz(p + 3);
        lib.evaluate(z.head(2), u, theta);
        dz(0) = z(1);
        dz(1) = xi.dot(theta);
        dz.segment(2, p) = theta;
        dz(p + 2) = u(1);
        return dz;
    };
    Eigen::VectorXd z0 = Eigen::VectorXd::Zero(p + 3);
    z0(0) = x0;
    z0(1) = xdot0;
    const Eigen::MatrixXd aug = numeric::integrate_rk4(rhs, z0, inputs, dt);

    const double K = xdot0 - b_prime * x0;
    std::vector<double> residual(static_cast<std::size_t>(traj.cols()));
    for (Eigen::Index k = 0; k < traj.cols(); ++k) {
        double others = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (j == i_dstate || j == i_dinput) continue;
            others += xi(j) * aug(2 + j, k);
        }
        residual[static_cast<std::size_t>(k)] =
            traj(1, k) - (b_prime * traj(0, k) + c_prime * aug(p + 2, k) + K + others);
    }
    return residual;
}

namespace {

std::string four_significant(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%#.4g", v);
    std::string s(buf);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

}  // namespace

std::string format_equations(const SparseModel& model) {
    static const std::string kMinus = "−";
    std::string out;
    for (Eigen::Index eq = 0; eq < model.coefficients.rows(); ++eq) {
        std::string line = "d(" + model.state_names[static_cast<std::size_t>(eq)] + ")/dt = ";
        bool first = true;
        for (Eigen::Index k = 0; k < model.coefficients.cols(); ++k) {
            const double c = model.coefficients(eq, k);
            if (c == 0.0) continue;
            const std::string& label = model.term_labels[static_cast<std::size_t>(k)];
            if (first) {
                if (c < 0) line += kMinus;
            } else {
                line += c < 0 ? " " + kMinus + " " : " + ";
            }
            line += four_significant(std::abs(c));
            if (label != "1") line += "·" + label;
            first = false;
        }
        if (first) line += "0";
        out += line + "\n";
    }
    return out;
}

nlohmann::json to_json(const SparseModel& model) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (Eigen::Index r = 0; r < model.coefficients.rows(); ++r) {
        std::vector<double> row(model.coefficients.row(r).begin(), model.coefficients.row(r).end());
        coeffs.push_back(row);
    }
    return {{"kind", "sindy"},
            {"order", model.order == ModelOrder::First ? 1 : 2},
            {"state_names", model.state_names},
            {"input_names", model.input_names},
            {"library", to_json(model.library)},
            {"term_labels", model.term_labels},
            {"coefficients", coeffs},
            {"column_scale", std::vector<double>(model.column_scale.begin(), model.column_scale.end())},
            {"threshold", model.threshold},
            {"residual_rmse", model.residual_rmse}};
}

SparseModel sparse_model_from_json(const nlohmann::json& j) {
    SparseModel m;
    try {
        const int order = j.at("order").get<int>();
        if (order != 1 && order != 2) throw Error(ErrorCode::ModelMismatch, "model order must be 1 or 2");
        m.order = order == 1 ? ModelOrder::First : ModelOrder::Second;
        m.state_names = j.at("state_names").get<std::vector<std::string>>();
        m.input_names = j.at("input_names").get<std::vector<std::string>>();
        m.library = library_spec_from_json(j.at("library"));
        m.term_labels = j.at("term_labels").get<std::vector<std::string>>();
        const auto rows = j.at("coefficients").get<std::vector<std::vector<double>>>();
        const auto scale = j.at("column_scale").get<std::vector<double>>();
        m.threshold = j.at("threshold").get<double>();
        m.residual_rmse = j.at("residual_rmse").get<std::vector<double>>();

        const std::size_t n_states = m.order == ModelOrder::First ? 1 : 2;
        if (m.state_names.size() != n_states || m.input_names.size() != n_states || rows.size() != n_states) {
            throw Error(ErrorCode::ModelMismatch, "state/input/equation counts do not match model order");
        }
        if (m.candidate_library().labels() != m.term_labels) {
            throw Error(ErrorCode::ModelMismatch, "term labels do not match the library specification");
        }
        const auto p = static_cast<Eigen::Index>(m.term_labels.size());
        if (static_cast<Eigen::Index>(scale.size()) != p) throw Error(ErrorCode::ModelMismatch, "column scale length");
        m.coefficients.resize(static_cast<Eigen::Index>(rows.size()), p);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (static_cast<Eigen::Index>(rows[r].size()) != p) {
                throw Error(ErrorCode::ModelMismatch, "coefficient row length differs from term count");
            }
            for (Eigen::Index k = 0; k < p; ++k) m.coefficients(static_cast<Eigen::Index>(r), k) = rows[r][static_cast<std::size_t>(k)];
        }
        m.column_scale = Eigen::Map<const Eigen::VectorXd>(scale.data(), p);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ModelMismatch, std::string("bad model file: ") + e.what());
    }
    return m;
}

}  // namespace tssid::sindy

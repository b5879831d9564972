#include "tssid/neural/lstm.hpp"

#include "tssid/error.hpp"
#include "tssid/neural/init.hpp"

namespace tssid::neural {

void LSTMConfig::validate() const {
    if (input_dim < 1 || num_layers < 1 || hidden_size < 1 || lookback < 1) {
        throw Error(ErrorCode::ConfigError, "LSTM input_dim, num_layers, hidden_size and lookback must be >= 1");
    }
}

struct LSTM::Cache {
    // [layer][step]
    std::vector<std::vector<Eigen::MatrixXd>> x, i, f, g, o, c, tanh_c, h;
};

namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

}  // namespace

LSTM::LSTM(LSTMConfig config, std::mt19937_64& rng) : config_(config) {
    config_.validate();
    const int h = config_.hidden_size;
    for (int l = 0; l < config_.num_layers; ++l) {
        const int in = l == 0 ? config_.input_dim : h;
        Eigen::MatrixXd W(4 * h, in), U(4 * h, h);
        for (int gate = 0; gate < 4; ++gate) W.middleRows(gate * h, h) = init_xavier(in, h, rng);
        for (int gate = 0; gate < 4; ++gate) U.middleRows(gate * h, h) = init_xavier(h, h, rng);
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4 * h, 1);
        b.middleRows(h, h).setOnes();
        params_.push_back(std::move(W));
        params_.push_back(std::move(U));
        params_.push_back(std::move(b));
    }
    params_.push_back(init_xavier(h, 1, rng));
    params_.push_back(Eigen::MatrixXd::Zero(1, 1));
}

LSTM::LSTM(LSTMConfig config) : config_(config) {
    config_.validate();
    const int h = config_.hidden_size;
    for (int l = 0; l < config_.num_layers; ++l) {
        const int in = l == 0 ? config_.input_dim : h;
        params_.push_back(Eigen::MatrixXd::Zero(4 * h, in));
        params_.push_back(Eigen::MatrixXd::Zero(4 * h, h));
        params_.push_back(Eigen::MatrixXd::Zero(4 * h, 1));
    }
    params_.push_back(Eigen::MatrixXd::Zero(1, h));
    params_.push_back(Eigen::MatrixXd::Zero(1, 1));
}

void LSTM::check_window(const Sequence& window) const {
    if (window.empty()) throw Error(ErrorCode::DimensionMismatch, "empty LSTM window");
    const Eigen::Index batch = window.front().cols();
    for (const auto& step : window) {
        if (step.rows() != config_.input_dim || step.cols() != batch) {
            throw Error(ErrorCode::DimensionMismatch, "LSTM expects " + std::to_string(config_.input_dim) +
                                                          " features per step with a common batch size");
        }
    }
}

Eigen::MatrixXd LSTM::run(const Sequence& window, Cache* cache) const {
    const int h = config_.hidden_size;
    const int layers = config_.num_layers;
    const auto steps = window.size();
    const Eigen::Index batch = window.front().cols();
    if (cache) {
        for (auto* v : {&cache->x, &cache->i, &cache->f, &cache->g, &cache->o, &cache->c, &cache->tanh_c, &cache->h}) {
            v->assign(static_cast<std::size_t>(layers), std::vector<Eigen::MatrixXd>(steps));
        }
    }
    Sequence below = window;
    for (int l = 0; l < layers; ++l) {
        const auto& W = params_[static_cast<std::size_t>(3 * l)];
        const auto& U = params_[static_cast<std::size_t>(3 * l + 1)];
        const auto& b = params_[static_cast<std::size_t>(3 * l + 2)];
        Eigen::MatrixXd hs = Eigen::MatrixXd::Zero(h, batch);
        Eigen::MatrixXd cs = Eigen::MatrixXd::Zero(h, batch);
        for (std::size_t t = 0; t < steps; ++t) {
            Eigen::MatrixXd z = W * below[t] + U * hs;
            z.colwise() += b.col(0);
            Eigen::MatrixXd ig = sigmoid(z.middleRows(0, h));
            Eigen::MatrixXd fg = sigmoid(z.middleRows(h, h));
            Eigen::MatrixXd gg = z.middleRows(2 * h, h).array().tanh().matrix();
            Eigen::MatrixXd og = sigmoid(z.middleRows(3 * h, h));
            cs = fg.cwiseProduct(cs) + ig.cwiseProduct(gg);
            Eigen::MatrixXd tc = cs.array().tanh().matrix();
            hs = og.cwiseProduct(tc);
            if (cache) {
                const auto L = static_cast<std::size_t>(l);
                cache->x[L][t] = below[t];
                cache->i[L][t] = std::move(ig);
                cache->f[L][t] = std::move(fg);
                cache->g[L][t] = std::move(gg);
                cache->o[L][t] = std::move(og);
                cache->c[L][t] = cs;
                cache->tanh_c[L][t] = std::move(tc);
                cache->h[L][t] = hs;
            }
            below[t] = hs;
        }
    }
    const auto& Wy = params_[static_cast<std::size_t>(3 * layers)];
    const double by = params_[static_cast<std::size_t>(3 * layers + 1)](0, 0);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(steps), batch);
    for (std::size_t t = 0; t < steps; ++t) {
        out.row(static_cast<Eigen::Index>(t)) = (Wy * below[t]).array() + by;
    }
    return out;
}

Eigen::MatrixXd LSTM::forward(const Sequence& window) const {
    check_window(window);
    return run(window, nullptr);
}

double LSTM::loss_and_gradient(const Sequence& window, const Eigen::MatrixXd& targets, Tensors& grads) const {
    check_window(window);
    if (static_cast<int>(window.size()) != config_.lookback) {
        throw Error(ErrorCode::DimensionMismatch, "LSTM window length " + std::to_string(window.size()) +
                                                      " differs from lookback " + std::to_string(config_.lookback));
    }
    const Eigen::Index batch = window.front().cols();
    if (targets.rows() != static_cast<Eigen::Index>(window.size()) || targets.cols() != batch) {
        throw Error(ErrorCode::DimensionMismatch, "LSTM target shape");
    }
    Cache cache;
    const Eigen::MatrixXd out = run(window, &cache);
    const double n = static_cast<double>(targets.size());
    const Eigen::MatrixXd err = out - targets;
    const double loss = err.squaredNorm() / n;

    const int h = config_.hidden_size;
    const int layers = config_.num_layers;
    const auto steps = window.size();
    grads.resize(params_.size());
    for (std::size_t k = 0; k < params_.size(); ++k) grads[k] = Eigen::MatrixXd::Zero(params_[k].rows(), params_[k].cols());

    const auto& Wy = params_[static_cast<std::size_t>(3 * layers)];
    auto& gWy = grads[static_cast<std::size_t>(3 * layers)];
    auto& gby = grads[static_cast<std::size_t>(3 * layers + 1)];
    // Gradient flowing into the hidden state of the current layer, per step.
    Sequence dh_above(steps);
    const auto top = static_cast<std::size_t>(layers - 1);
    for (std::size_t t = 0; t < steps; ++t) {
        const Eigen::RowVectorXd dy = (2.0 / n) * err.row(static_cast<Eigen::Index>(t));
        gWy += dy * cache.h[top][t].transpose();
        gby(0, 0) += dy.sum();
        dh_above[t] = Wy.transpose() * dy;
    }

    for (int l = layers; l-- > 0;) {
        const auto L = static_cast<std::size_t>(l);
        const auto& W = params_[3 * L];
        const auto& U = params_[3 * L + 1];
        auto& gW = grads[3 * L];
        auto& gU = grads[3 * L + 1];
        auto& gb = grads[3 * L + 2];
        Eigen::MatrixXd dh_next = Eigen::MatrixXd::Zero(h, batch);
        Eigen::MatrixXd dc_next = Eigen::MatrixXd::Zero(h, batch);
        Eigen::MatrixXd da(4 * h, batch);
        Sequence dx(steps);
        for (std::size_t t = steps; t-- > 0;) {
            const Eigen::MatrixXd dh = dh_above[t] + dh_next;
            const auto& ig = cache.i[L][t];
            const auto& fg = cache.f[L][t];
            const auto& gg = cache.g[L][t];
            const auto& og = cache.o[L][t];
            const auto& tc = cache.tanh_c[L][t];
            const Eigen::MatrixXd dc =
                dc_next + dh.cwiseProduct(og).cwiseProduct((1.0 - tc.array().square()).matrix());
            const Eigen::MatrixXd c_prev = t > 0 ? cache.c[L][t - 1] : Eigen::MatrixXd::Zero(h, batch);
            const Eigen::MatrixXd h_prev = t > 0 ? cache.h[L][t - 1] : Eigen::MatrixXd::Zero(h, batch);
            da.middleRows(0, h) = (dc.cwiseProduct(gg).array() * ig.array() * (1.0 - ig.array())).matrix();
            da.middleRows(h, h) = (dc.cwiseProduct(c_prev).array() * fg.array() * (1.0 - fg.array())).matrix();
            da.middleRows(2 * h, h) = (dc.cwiseProduct(ig).array() * (1.0 - gg.array().square())).matrix();
            da.middleRows(3 * h, h) = (dh.cwiseProduct(tc).array() * og.array() * (1.0 - og.array())).matrix();
            gW += da * cache.x[L][t].transpose();
            gU += da * h_prev.transpose();
            gb += da.rowwise().sum();
            dh_next = U.transpose() * da;
            dc_next = dc.cwiseProduct(fg);
            if (l > 0) dx[t] = W.transpose() * da;
        }
        dh_above = std::move(dx);
    }
    return loss;
}

}  // namespace tssid::neural

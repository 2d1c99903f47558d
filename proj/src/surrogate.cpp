#include "vawt/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace vawt {

std::vector<double> normalize(const Genotype& g) {
    std::vector<double> x;
    x.reserve(static_cast<std::size_t>(input_width(g.mode())));
    for (int a : g.xy) x.push_back((a - kXyMin) / double(kXyMax - kXyMin));
    if (g.z)
        for (int a : *g.z) x.push_back((a - kZMin) / double(kZMax - kZMin));
    if (g.rotation) x.push_back(*g.rotation ? 1.0 : 0.0);
    return x;
}

int input_width(GenomeMode mode) {
    switch (mode) {
        case GenomeMode::flat: return kXyGenes;
        case GenomeMode::z_varying: return kXyGenes + kZGenes;
        case GenomeMode::array: return kXyGenes + kZGenes + 1;
    }
    return kXyGenes;
}

namespace {
double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }
}  // namespace

SurrogateModel::SurrogateModel(int input_width, int hidden)
    : in_(input_width),
      hidden_(hidden),
      w1_(static_cast<std::size_t>(hidden) * input_width, 0.0),
      b1_(static_cast<std::size_t>(hidden), kTheta),
      w2_(static_cast<std::size_t>(hidden), 0.0) {
    b2_ = kTheta;
}

void SurrogateModel::reinitialize(Rng& rng) {
    for (double& w : w1_) w = rng.uniform() - 0.5;
    for (double& w : w2_) w = rng.uniform() - 0.5;
    std::fill(b1_.begin(), b1_.end(), kTheta);
    b2_ = kTheta;
}

double SurrogateModel::forward_normalized(const std::vector<double>& x) const {
    double out = b2_;
    for (int h = 0; h < hidden_; ++h) {
        double a = b1_[h];
        const double* row = w1_.data() + static_cast<std::size_t>(h) * in_;
        for (int i = 0; i < in_; ++i) a += row[i] * x[i];
        out += w2_[h] * sigmoid(a);
    }
    return sigmoid(out);
}

void SurrogateModel::gradient(const std::vector<double>& x, double target,
                              std::vector<double>& gw1, std::vector<double>& gb1,
                              std::vector<double>& gw2, double& gb2) const {
    std::vector<double> hidden_act(hidden_);
    double out_sum = b2_;
    for (int h = 0; h < hidden_; ++h) {
        double a = b1_[h];
        const double* row = w1_.data() + static_cast<std::size_t>(h) * in_;
        for (int i = 0; i < in_; ++i) a += row[i] * x[i];
        hidden_act[h] = sigmoid(a);
        out_sum += w2_[h] * hidden_act[h];
    }
    double y = sigmoid(out_sum);
    // squared error E = (y - t)^2 / 2
    double delta_out = (y - target) * y * (1.0 - y);
    gb2 = delta_out;
    for (int h = 0; h < hidden_; ++h) {
        gw2[h] = delta_out * hidden_act[h];
        double delta_h = delta_out * w2_[h] * hidden_act[h] * (1.0 - hidden_act[h]);
        gb1[h] = delta_h;
        double* grow = gw1.data() + static_cast<std::size_t>(h) * in_;
        for (int i = 0; i < in_; ++i) grow[i] = delta_h * x[i];
    }
}

void SurrogateModel::step(const std::vector<double>& x, double target, double beta) {
    std::vector<double> gw1(w1_.size()), gb1(b1_.size()), gw2(w2_.size());
    double gb2 = 0;
    gradient(x, target, gw1, gb1, gw2, gb2);
    for (std::size_t i = 0; i < w1_.size(); ++i) w1_[i] -= beta * gw1[i];
    for (std::size_t i = 0; i < b1_.size(); ++i) b1_[i] -= beta * gb1[i];
    for (std::size_t i = 0; i < w2_.size(); ++i) w2_[i] -= beta * gw2[i];
    b2_ -= beta * gb2;
}

void SurrogateModel::train(const std::vector<EvaluatedRecord>& records, int epochs, Rng& rng,
                           double beta, const std::function<void(int)>& on_sample) {
    if (records.empty()) throw std::invalid_argument("train needs at least one record");
    fit_lo_ = records[0].real_fitness;
    fit_hi_ = records[0].real_fitness;
    for (const auto& r : records) {
        fit_lo_ = std::min(fit_lo_, r.real_fitness);
        fit_hi_ = std::max(fit_hi_, r.real_fitness);
    }
    double span = fit_hi_ - fit_lo_;
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;
    inputs.reserve(records.size());
    targets.reserve(records.size());
    for (const auto& r : records) {
        inputs.push_back(normalize(r.genotype));
        targets.push_back(span > 0 ? (r.real_fitness - fit_lo_) / span : 0.5);
    }

    std::vector<int> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    for (int e = 0; e < epochs; ++e) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.bounded(i)]);
        for (int idx : order) {
            if (on_sample) on_sample(idx);
            step(inputs[static_cast<std::size_t>(idx)], targets[static_cast<std::size_t>(idx)],
                 beta);
        }
    }
}

double SurrogateModel::predict(const Genotype& g) const {
    double y = forward_normalized(normalize(g));
    return fit_lo_ + y * (fit_hi_ - fit_lo_);
}

double SurrogateModel::gradient_check(const std::vector<double>& x, double target,
                                      double h) const {
    std::vector<double> gw1(w1_.size()), gb1(b1_.size()), gw2(w2_.size());
    double gb2 = 0;
    gradient(x, target, gw1, gb1, gw2, gb2);

    SurrogateModel probe = *this;
    auto loss = [&probe, &x, target]() {
        double y = probe.forward_normalized(x);
        return 0.5 * (y - target) * (y - target);
    };
    auto central = [&](double& param) {
        double saved = param;
        param = saved + h;
        double up = loss();
        param = saved - h;
        double down = loss();
        param = saved;
        return (up - down) / (2 * h);
    };

    double max_rel = 0;
    auto check = [&max_rel](double analytic, double numeric) {
        double rel = std::fabs(analytic - numeric) /
                     std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
        max_rel = std::max(max_rel, rel);
    };
    for (std::size_t i = 0; i < probe.w1_.size(); ++i) check(gw1[i], central(probe.w1_[i]));
    for (std::size_t i = 0; i < probe.b1_.size(); ++i) check(gb1[i], central(probe.b1_[i]));
    for (std::size_t i = 0; i < probe.w2_.size(); ++i) check(gw2[i], central(probe.w2_[i]));
    check(gb2, central(probe.b2_));
    return max_rel;
}

void SurrogateModel::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["format"] = "vawt-mlp";
    j["version"] = 1;
    j["input_width"] = in_;
    j["hidden"] = hidden_;
    j["beta"] = kBeta;
    j["theta"] = kTheta;
    j["momentum"] = kMomentum;
    j["fitness_lo"] = fit_lo_;
    j["fitness_hi"] = fit_hi_;
    j["w1"] = w1_;
    j["b1"] = b1_;
    j["w2"] = w2_;
    j["b2"] = b2_;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
}

SurrogateModel SurrogateModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("format", "") != "vawt-mlp" || j.value("version", 0) != 1)
        throw std::runtime_error("unsupported model checkpoint format in " + path.string());
    SurrogateModel m(j.at("input_width").get<int>(), j.at("hidden").get<int>());
    m.w1_ = j.at("w1").get<std::vector<double>>();
    m.b1_ = j.at("b1").get<std::vector<double>>();
    m.w2_ = j.at("w2").get<std::vector<double>>();
    m.b2_ = j.at("b2").get<double>();
    m.fit_lo_ = j.at("fitness_lo").get<double>();
    m.fit_hi_ = j.at("fitness_hi").get<double>();
    if (m.w1_.size() != static_cast<std::size_t>(m.in_) * m.hidden_ ||
        m.b1_.size() != static_cast<std::size_t>(m.hidden_) ||
        m.w2_.size() != static_cast<std::size_t>(m.hidden_))
        throw std::runtime_error("model checkpoint has inconsistent shapes: " + path.string());
    return m;
}

}  // namespace vawt

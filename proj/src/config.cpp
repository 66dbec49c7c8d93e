// SPDX-License-Identifier: Apache-2.0

#include "isacwave/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace isacwave {

namespace {

using nlohmann::json;

// Strict object walker: every key must be consumed by the schema.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string where) : obj_(j), where_(std::move(where)) {
        if (!obj_.is_object()) {
            throw ConfigError(where_ + " must be a JSON object");
        }
    }

    template <typename T>
    void get(const char* key, T& out) {
        auto it = obj_.find(key);
        if (it == obj_.end()) {
            return; // optional; default stands
        }
        seen_.insert(key);
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where_ + "." + key + " has the wrong type");
        }
    }

    const json* child(const char* key) {
        auto it = obj_.find(key);
        if (it == obj_.end()) {
            return nullptr;
        }
        seen_.insert(key);
        return &*it;
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.contains(it.key())) {
                throw ConfigError("unknown key " + where_ + "." + it.key());
            }
        }
    }

private:
    const json& obj_;
    std::string where_;
    std::set<std::string> seen_;
};

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    ExperimentConfig cfg;
    ObjectReader root(j, "config");
    root.get("waveforms", cfg.waveforms);
    root.get("alpha", cfg.alpha);
    root.get("beta", cfg.beta);
    root.get("M", cfg.M);
    root.get("K", cfg.K);
    root.get("N", cfg.N);
    root.get("D", cfg.D);
    root.get("delta_f_hz", cfg.delta_f_hz);
    root.get("n_cp", cfg.n_cp);
    if (const json* doppler = root.child("doppler")) {
        ObjectReader r(*doppler, "config.doppler");
        r.get("f_d_max_hz", cfg.f_d_max_hz);
        r.get("J", cfg.J);
        r.finish();
    }
    if (const json* loss = root.child("loss")) {
        ObjectReader r(*loss, "config.loss");
        r.get("omega1", cfg.omega1);
        r.get("omega2", cfg.omega2);
        r.get("sigma", cfg.sigma);
        r.get("p_th_db", cfg.p_th_db);
        r.get("b", cfg.b);
        r.get("f_b_hz", cfg.f_b_hz);
        r.get("full_doppler", cfg.full_doppler);
        r.get("db_terms", cfg.db_terms);
        r.get("lse_temperature", cfg.lse_temperature);
        r.finish();
    }
    if (const json* mode = root.child("mode")) {
        ObjectReader r(*mode, "config.mode");
        r.get("constraint", cfg.constraint);
        r.get("b_phases", cfg.b_phases);
        r.get("circular", cfg.circular);
        r.finish();
    }
    if (const json* opt = root.child("optimizer")) {
        ObjectReader r(*opt, "config.optimizer");
        r.get("iterations", cfg.iterations);
        r.get("eta", cfg.eta);
        r.get("rho1", cfg.rho1);
        r.get("rho2", cfg.rho2);
        r.get("eps", cfg.eps);
        r.get("optimize_fdss", cfg.optimize_fdss);
        r.get("fdss_complex", cfg.fdss_complex);
        r.get("init", cfg.init);
        r.finish();
    }
    if (const json* baseline = root.child("baseline")) {
        ObjectReader r(*baseline, "config.baseline");
        r.get("scheme", cfg.scheme);
        r.get("rrc_roll_off", cfg.rrc_roll_off);
        r.get("cp_ofdm_qpsk", cfg.cp_ofdm_qpsk);
        r.get("zc_column_shifts", cfg.zc_column_shifts);
        r.get("zc_truncate", cfg.zc_truncate);
        r.finish();
    }
    if (const json* sweep = root.child("sweep")) {
        ObjectReader r(*sweep, "config.sweep");
        r.get("omega1_grid", cfg.omega1_grid);
        r.get("p_th_grid_db", cfg.p_th_grid_db);
        r.get("restarts", cfg.restarts);
        r.finish();
    }
    root.get("cross_product", cfg.cross_product);
    root.get("seed", cfg.seed);
    root.get("out_dir", cfg.out_dir);
    root.get("threads", cfg.threads);
    root.finish();

    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config: " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    j["waveforms"] = waveforms;
    j["alpha"] = alpha;
    j["beta"] = beta;
    j["M"] = M;
    j["K"] = K;
    j["N"] = N;
    j["D"] = D;
    j["delta_f_hz"] = delta_f_hz;
    j["n_cp"] = n_cp;
    j["doppler"] = {{"f_d_max_hz", f_d_max_hz}, {"J", J}};
    j["loss"] = {{"omega1", omega1},
                 {"omega2", omega2},
                 {"sigma", sigma},
                 {"p_th_db", p_th_db},
                 {"b", b},
                 {"f_b_hz", f_b_hz},
                 {"full_doppler", full_doppler},
                 {"db_terms", db_terms},
                 {"lse_temperature", lse_temperature}};
    j["mode"] = {{"constraint", constraint}, {"b_phases", b_phases}, {"circular", circular}};
    j["optimizer"] = {{"iterations", iterations}, {"eta", eta},   {"rho1", rho1},
                      {"rho2", rho2},             {"eps", eps},   {"optimize_fdss", optimize_fdss},
                      {"fdss_complex", fdss_complex}, {"init", init}};
    j["baseline"] = {{"scheme", scheme},
                     {"rrc_roll_off", rrc_roll_off},
                     {"cp_ofdm_qpsk", cp_ofdm_qpsk},
                     {"zc_column_shifts", zc_column_shifts},
                     {"zc_truncate", zc_truncate}};
    j["sweep"] = {{"omega1_grid", omega1_grid},
                  {"p_th_grid_db", p_th_grid_db},
                  {"restarts", restarts}};
    j["cross_product"] = cross_product;
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["threads"] = threads;
    return j.dump(2) + "\n";
}

WaveformParams ExperimentConfig::params() const {
    WaveformParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.M = M;
    p.K = K;
    p.N = N;
    p.D = D;
    p.delta_f = delta_f_hz;
    p.n_cp = n_cp;
    p.validate();
    return p;
}

WaveformParams ExperimentConfig::params_for(WaveformKind kind) const {
    WaveformParams p = params();
    const bool ftn = kind == WaveformKind::FtnSOfdm || kind == WaveformKind::FtnSOtfs ||
                     kind == WaveformKind::DftnSOtfs;
    if (!ftn) {
        p.alpha = 1.0;
    }
    if (kind != WaveformKind::DftnSOtfs) {
        p.beta = 1.0;
    }
    p.validate();
    return p;
}

DopplerGrid ExperimentConfig::grid(const WaveformParams& p) const {
    return DopplerGrid::make(f_d_max_hz, J, p);
}

ConstraintMode ExperimentConfig::mode() const {
    const ConstraintTag tag = constraint_tag_from_string(constraint);
    ConstraintMode m;
    switch (tag) {
    case ConstraintTag::Continuous:
        m = ConstraintMode::continuous();
        break;
    case ConstraintTag::UnimodularContinuous:
        m = ConstraintMode::unimodular_continuous();
        break;
    case ConstraintTag::UnimodularDiscrete:
        m = ConstraintMode::unimodular_discrete(b_phases);
        break;
    }
    m.circular = circular;
    m.validate();
    return m;
}

LossConfig ExperimentConfig::loss(const WaveformParams& p) const {
    LossConfig l;
    l.omega1 = omega1;
    l.omega2 = omega2;
    l.sigma = sigma;
    l.p_th_db = p_th_db;
    l.b = b >= 0 ? b
                 : std::max(1, static_cast<int>(std::lround(static_cast<double>(p.N) / p.M)));
    l.f_b = f_b_hz;
    l.full_doppler = full_doppler;
    l.db_terms = db_terms;
    l.lse_temperature = lse_temperature;
    l.validate(p.D);
    return l;
}

OptimizeConfig ExperimentConfig::optimize_config(const WaveformParams& p) const {
    OptimizeConfig cfg;
    cfg.iterations = iterations;
    cfg.adam = AdamConfig{eta, rho1, rho2, eps};
    cfg.loss = loss(p);
    cfg.mode = mode();
    cfg.optimize_fdss = optimize_fdss;
    cfg.fdss_complex = fdss_complex;
    cfg.seed = seed;
    cfg.threads = threads;
    return cfg;
}

void ExperimentConfig::validate() const {
    if (waveforms.empty()) {
        throw ConfigError("config needs at least one waveform kind");
    }
    for (const std::string& name : waveforms) {
        const WaveformKind kind = waveform_kind_from_string(name);
        if (kind == WaveformKind::Custom) {
            throw ConfigError("the CLI only drives the six named waveforms");
        }
    }
    baseline_scheme_from_string(scheme);
    if (init != "random") {
        if (init.rfind("baseline:", 0) != 0) {
            throw ConfigError("optimizer.init must be 'random' or 'baseline:<scheme>'");
        }
        baseline_scheme_from_string(init.substr(9));
    }
    if (threads < 1) {
        throw ConfigError("threads must be >= 1");
    }
    if (iterations < 1) {
        throw ConfigError("optimizer.iterations must be >= 1");
    }
    if (restarts < 1) {
        throw ConfigError("sweep.restarts must be >= 1");
    }
    if (rrc_roll_off < 0.0 || rrc_roll_off > 1.0) {
        throw ConfigError("baseline.rrc_roll_off must lie in [0, 1]");
    }
    // Dimension and grid invariants re-validate on derivation; do it now so
    // config errors surface at load time.
    const WaveformParams p = params();
    (void)grid(p);
    (void)mode();
    (void)loss(p);
}

} // namespace isacwave

// SPDX-License-Identifier: Apache-2.0

#include "isacwave/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "array formats assume a little-endian host");

namespace isacwave {

namespace {

using nlohmann::json;

void put_u64(std::ofstream& out, uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint64_t get_u64(std::ifstream& in) {
    uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot open for writing: " + path);
    }
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open for reading: " + path);
    }
    return in;
}

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

void write_rvec_block(std::ofstream& out, const RVec& v) {
    put_u64(out, static_cast<uint64_t>(v.size()));
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(v.size())));
}

RVec read_rvec_block(std::ifstream& in) {
    const uint64_t n = get_u64(in);
    RVec v(static_cast<Eigen::Index>(n));
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double) * n));
    if (!in) {
        throw ConfigError("truncated vector block");
    }
    return v;
}

void write_cmat_block(std::ofstream& out, const CMat& m) {
    put_u64(out, static_cast<uint64_t>(m.rows()));
    put_u64(out, static_cast<uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double re = m(r, c).real();
            const double im = m(r, c).imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof(re));
            out.write(reinterpret_cast<const char*>(&im), sizeof(im));
        }
    }
}

CMat read_cmat_block(std::ifstream& in) {
    const uint64_t rows = get_u64(in);
    const uint64_t cols = get_u64(in);
    if (!in || rows > (1u << 24) || cols > (1u << 24)) {
        throw ConfigError("corrupt array header");
    }
    CMat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            double re = 0.0, im = 0.0;
            in.read(reinterpret_cast<char*>(&re), sizeof(re));
            in.read(reinterpret_cast<char*>(&im), sizeof(im));
            m(r, c) = Complex(re, im);
        }
    }
    if (!in) {
        throw ConfigError("truncated array payload");
    }
    return m;
}

} // namespace

void write_carray(const std::string& path, const CMat& m) {
    std::ofstream out = open_out(path);
    write_cmat_block(out, m);
}

CMat read_carray(const std::string& path) {
    std::ifstream in = open_in(path);
    return read_cmat_block(in);
}

void write_rarray(const std::string& path, const RMat& m) {
    write_carray(path, m.cast<Complex>());
}

RMat read_rarray(const std::string& path) {
    return read_carray(path).real();
}

std::string metrics_report_json(const MetricsReport& report) {
    std::string s = "{\n";
    s += "  \"papr_db\": " + fixed4(report.papr_db) + ",\n";
    s += "  \"apsl_db\": " + fixed4(report.apsl_db) + ",\n";
    s += "  \"cpsl_db\": " + (report.cpsl_db ? fixed4(*report.cpsl_db) : "null") + ",\n";
    s += "  \"b\": " + std::to_string(report.b) + ",\n";
    s += "  \"f_b\": " + fixed4(report.f_b) + ",\n";
    s += "  \"w1\": " + fixed4(report.w1) + ",\n";
    s += "  \"w2\": " + fixed4(report.w2) + "\n";
    s += "}\n";
    return s;
}

void write_metrics_report(const std::string& path, const MetricsReport& report) {
    std::ofstream out = open_out(path);
    out << metrics_report_json(report);
}

MetricsReport read_metrics_report(const std::string& path) {
    std::ifstream in = open_in(path);
    json j = json::parse(in);
    MetricsReport r;
    r.papr_db = j.at("papr_db").get<double>();
    r.apsl_db = j.at("apsl_db").get<double>();
    if (!j.at("cpsl_db").is_null()) {
        r.cpsl_db = j.at("cpsl_db").get<double>();
    }
    r.b = j.at("b").get<int>();
    r.f_b = j.at("f_b").get<double>();
    r.w1 = j.at("w1").get<double>();
    r.w2 = j.at("w2").get<double>();
    return r;
}

std::string af_sidecar_json(const AfSurface& surface, const DopplerGrid& grid) {
    std::string s = "{\n";
    s += "  \"d1\": " + std::to_string(surface.d1) + ",\n";
    s += "  \"d2\": " + std::to_string(surface.d2) + ",\n";
    s += "  \"af_ref\": " + fixed4(surface.af_ref) + ",\n";
    s += "  \"n\": " + std::to_string(surface.mag.rows()) + ",\n";
    s += "  \"J\": " + std::to_string(grid.J) + ",\n";
    s += "  \"f_d_max_hz\": " + fixed4(grid.f_d_max) + ",\n";
    s += "  \"delta_f_ds_hz\": " + fixed4(grid.step()) + "\n";
    s += "}\n";
    return s;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
    std::ofstream out = open_out(path);
    out << "iter,loss,apsl_db,cpsl_db,papr_db\n";
    char buf[256];
    for (const TraceRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%ld,%.10g,%.4f,%.4f,%.4f\n", r.iter, r.loss,
                      r.apsl_db, r.cpsl_db, r.papr_db);
        out << buf;
    }
}

void write_front_csv(const std::string& path, const std::vector<FrontRow>& rows) {
    std::ofstream out = open_out(path);
    out << "omega1,p_th_db,seed,papr_db,apsl_db,cpsl_db,is_pareto,is_turning_point\n";
    char buf[320];
    for (const FrontRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.6g,%.4f,%" PRIu64 ",%.4f,%.4f,%.4f,%d,%d\n",
                      r.point.omega1, r.point.p_th_db, r.point.seed, r.point.papr_db,
                      r.point.apsl_db, r.point.cpsl_db, r.is_pareto ? 1 : 0,
                      r.is_turning_point ? 1 : 0);
        out << buf;
    }
}

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    json header;
    header["format"] = "isacwave-checkpoint-1";
    header["label"] = ckpt.label;
    header["kind"] = to_string(ckpt.kind);
    header["mode"] = to_string(ckpt.mode_tag);
    header["b_phases"] = ckpt.b_phases;
    header["circular"] = ckpt.circular;
    header["optimize_fdss"] = ckpt.optimize_fdss;
    header["fdss_complex"] = ckpt.fdss_complex;
    header["alpha"] = ckpt.params.alpha;
    header["beta"] = ckpt.params.beta;
    header["M"] = ckpt.params.M;
    header["K"] = ckpt.params.K;
    header["N"] = ckpt.params.N;
    header["D"] = ckpt.params.D;
    header["delta_f_hz"] = ckpt.params.delta_f;
    header["n_cp"] = ckpt.params.n_cp;
    header["f_d_max_hz"] = ckpt.f_d_max;
    header["J"] = ckpt.J;
    header["seed"] = ckpt.seed;
    header["t"] = ckpt.t;
    const std::string text = header.dump();

    std::ofstream out = open_out(path);
    out.write("ISWC", 4);
    put_u64(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    write_cmat_block(out, ckpt.A);
    write_cmat_block(out, ckpt.B);
    write_cmat_block(out, ckpt.c);
    write_rvec_block(out, ckpt.w);
    write_rvec_block(out, ckpt.best_w);
    write_rvec_block(out, ckpt.m1);
    write_rvec_block(out, ckpt.m2);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in = open_in(path);
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "ISWC", 4) != 0) {
        throw ConfigError("not a checkpoint file: " + path);
    }
    const uint64_t len = get_u64(in);
    if (!in || len > (1u << 20)) {
        throw ConfigError("corrupt checkpoint header");
    }
    std::string text(len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(len));
    const json header = json::parse(text);
    if (header.at("format").get<std::string>() != "isacwave-checkpoint-1") {
        throw ConfigError("unsupported checkpoint format");
    }

    Checkpoint ckpt;
    ckpt.label = header.at("label").get<std::string>();
    ckpt.kind = waveform_kind_from_string(header.at("kind").get<std::string>());
    ckpt.mode_tag = constraint_tag_from_string(header.at("mode").get<std::string>());
    ckpt.b_phases = header.at("b_phases").get<int>();
    ckpt.circular = header.at("circular").get<bool>();
    ckpt.optimize_fdss = header.at("optimize_fdss").get<bool>();
    ckpt.fdss_complex = header.value("fdss_complex", false);
    ckpt.params.alpha = header.at("alpha").get<double>();
    ckpt.params.beta = header.at("beta").get<double>();
    ckpt.params.M = header.at("M").get<int>();
    ckpt.params.K = header.at("K").get<int>();
    ckpt.params.N = header.at("N").get<int>();
    ckpt.params.D = header.at("D").get<int>();
    ckpt.params.delta_f = header.at("delta_f_hz").get<double>();
    ckpt.params.n_cp = header.at("n_cp").get<int>();
    ckpt.f_d_max = header.at("f_d_max_hz").get<double>();
    ckpt.J = header.at("J").get<int>();
    ckpt.seed = header.at("seed").get<uint64_t>();
    ckpt.t = header.at("t").get<long>();
    ckpt.A = read_cmat_block(in);
    ckpt.B = read_cmat_block(in);
    const CMat c = read_cmat_block(in);
    ckpt.c = c.col(0);
    ckpt.w = read_rvec_block(in);
    ckpt.best_w = read_rvec_block(in);
    ckpt.m1 = read_rvec_block(in);
    ckpt.m2 = read_rvec_block(in);
    return ckpt;
}

void write_manifest(const std::string& dir, std::vector<std::string> files) {
    std::sort(files.begin(), files.end());
    json j;
    j["files"] = files;
    std::ofstream out = open_out(dir + "/manifest.json");
    out << j.dump(2) << "\n";
}

} // namespace isacwave

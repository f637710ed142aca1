#include "wcpl/results.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace wcpl {

namespace {

std::string timestamp_line() {
    char buf[64];
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "# generated=%Y-%m-%dT%H:%M:%SZ\n", &tm);
    return buf;
}

}  // namespace

std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string provenance_lines(const Provenance& prov) {
    std::string out = "# config-hash=" + hash_hex(prov.config_hash) +
                      " version=" + prov.version +
                      " seed=" + std::to_string(prov.seed) + "\n";
    if (prov.timestamps) out += timestamp_line();
    return out;
}

CurveCsv::CurveCsv(const std::string& path, const Provenance& prov)
    : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    out_ << provenance_lines(prov);
    out_ << "alpha,lambda,residual,iterations,R_max,converged,mass,kinetic,"
            "potential_V,potential_W\n";
    out_.flush();
}

void CurveCsv::append(const SpectralResult& res) {
    out_ << fmt17(res.alpha) << ',' << fmt17(res.lambda) << ','
         << fmt17(res.residual) << ',' << res.iterations << ','
         << fmt17(res.r_max) << ',' << (res.converged ? "true" : "false") << ','
         << fmt17(res.breakdown.mass) << ',' << fmt17(res.breakdown.kinetic) << ','
         << fmt17(res.breakdown.potential_V) << ','
         << fmt17(res.breakdown.potential_W) << '\n';
    out_.flush();
}

void write_bounds_csv(const std::string& path, const Provenance& prov,
                      const std::vector<BoundsRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << provenance_lines(prov);
    out << "check_name,p,N,alpha,parameter,value,threshold,pass\n";
    for (const BoundsRow& row : rows) {
        out << row.check_name << ',' << fmt17(row.p) << ',' << row.dim << ','
            << fmt17(row.alpha) << ',' << row.parameter << ',' << fmt17(row.value)
            << ',' << fmt17(row.threshold) << ',' << (row.pass ? "true" : "false")
            << '\n';
    }
}

void write_plot_dat(const std::string& path, const Provenance& prov,
                    const std::vector<double>& alphas,
                    const std::vector<double>& lambdas) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << provenance_lines(prov);
    out << "# log_alpha log_neg_lambda\n";
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(lambdas[i] < 0.0)) continue;
        out << fmt17(std::log(alphas[i])) << ' ' << fmt17(std::log(-lambdas[i]))
            << '\n';
    }
}

}  // namespace wcpl

#include "bqec/runner/plots.hpp"

#include "bqec/codes.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

namespace bqec::runner {

namespace {

using RowFilter = std::function<bool(const ResultRow&)>;

std::vector<const ResultRow*> select(const std::vector<ResultRow>& rows, const RowFilter& f) {
    std::vector<const ResultRow*> out;
    for (const auto& r : rows)
        if (f(r)) out.push_back(&r);
    return out;
}

double break_even_constant(const std::vector<ResultRow>& rows) {
    for (const auto& r : rows)
        if (r.kind == "break-even") return r.infidelity;
    throw ConfigError("plot recipe: no break-even row in the result table");
}

void write_panel(const std::string& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<double>>& columns) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    const size_t n = columns.front().size();
    for (size_t r = 0; r < n; ++r) {
        for (size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << format_double(columns[c][r]);
        out << '\n';
    }
}

std::string fmt_short(double v) {
    std::string s = format_double(v);
    return s;
}

// x-indexed series table: one y column per series key, complete grid required.
struct SeriesTable {
    std::vector<double> xs;
    std::vector<std::string> keys;
    std::map<std::pair<std::string, double>, double> y;

    void insert(const std::string& key, double x, double v) { y[{key, x}] = v; }
    void finalize_axes() {
        std::set<double> xset;
        std::set<std::string> kset;
        for (const auto& [k, v] : y) {
            kset.insert(k.first);
            xset.insert(k.second);
        }
        xs.assign(xset.begin(), xset.end());
        keys.assign(kset.begin(), kset.end());
    }
    void check_complete(const std::string& recipe) const {
        std::string missing;
        for (const auto& k : keys)
            for (double x : xs)
                if (!y.count({k, x})) missing += " (" + k + ", x=" + fmt_short(x) + ")";
        if (!missing.empty())
            throw ConfigError("plot recipe " + recipe + ": missing grid points:" + missing);
    }
};

}  // namespace

std::vector<std::string> emit_plot_data(const std::string& recipe,
                                        const std::vector<ResultRow>& rows,
                                        const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::vector<std::string> written;

    if (recipe == "fig5") {
        // Infidelity vs nbar, one column per measurement scheme, plus the
        // break-even constant.
        SeriesTable t;
        for (const auto* r : select(rows, [](const ResultRow& r) { return r.kind == "rsb"; }))
            t.insert(r->scheme, r->param, r->infidelity);
        t.finalize_axes();
        if (t.xs.empty()) throw ConfigError("plot recipe fig5: no rsb rows");
        t.check_complete("fig5");
        const double be = break_even_constant(rows);
        std::vector<std::string> header{"nbar"};
        std::vector<std::vector<double>> cols{t.xs};
        for (const auto& k : t.keys) {
            header.push_back(k);
            std::vector<double> col;
            for (double x : t.xs) col.push_back(t.y.at({k, x}));
            cols.push_back(std::move(col));
        }
        header.push_back("break_even");
        cols.emplace_back(t.xs.size(), be);
        const std::string path = out_dir + "/fig5.csv";
        write_panel(path, header, cols);
        written.push_back(path);
    } else if (recipe == "fig6") {
        // Infidelity vs nbar, one column per efficiency, one panel per scheme.
        std::set<std::string> schemes;
        for (const auto& r : rows)
            if (r.kind == "rsb") schemes.insert(r.scheme);
        if (schemes.empty()) throw ConfigError("plot recipe fig6: no rsb rows");
        const double be = break_even_constant(rows);
        for (const auto& scheme : schemes) {
            SeriesTable t;
            for (const auto* r : select(rows, [&](const ResultRow& r) {
                     return r.kind == "rsb" && r.scheme == scheme;
                 }))
                t.insert("eta_" + fmt_short(r->eta), r->param, r->infidelity);
            t.finalize_axes();
            t.check_complete("fig6");
            std::vector<std::string> header{"nbar"};
            std::vector<std::vector<double>> cols{t.xs};
            for (const auto& k : t.keys) {
                header.push_back(k);
                std::vector<double> col;
                for (double x : t.xs) col.push_back(t.y.at({k, x}));
                cols.push_back(std::move(col));
            }
            header.push_back("break_even");
            cols.emplace_back(t.xs.size(), be);
            const std::string path = out_dir + "/fig6_" + scheme + ".csv";
            write_panel(path, header, cols);
            written.push_back(path);
        }
    } else if (recipe == "fig9") {
        // Fock simulation vs twirl prediction as a function of delta, one
        // column pair per efficiency.
        SeriesTable t;
        for (const auto* r : select(rows, [](const ResultRow& r) { return r.kind == "gkp"; })) {
            t.insert("fock_eta_" + fmt_short(r->eta), r->param, r->infidelity);
            t.insert("twirl_eta_" + fmt_short(r->eta), r->param, r->twirl_infidelity);
        }
        t.finalize_axes();
        if (t.xs.empty()) throw ConfigError("plot recipe fig9: no gkp rows");
        t.check_complete("fig9");
        std::vector<std::string> header{"delta", "squeezing_db"};
        std::vector<std::vector<double>> cols{t.xs, {}};
        for (double x : t.xs) cols[1].push_back(codes::squeezing_db(x));
        for (const auto& k : t.keys) {
            header.push_back(k);
            std::vector<double> col;
            for (double x : t.xs) col.push_back(t.y.at({k, x}));
            cols.push_back(std::move(col));
        }
        const std::string path = out_dir + "/fig9.csv";
        write_panel(path, header, cols);
        written.push_back(path);
    } else if (recipe == "fig10") {
        // gkp and rsb infidelity against the average code photon number, one
        // panel each, with the break-even constant.
        const double be = break_even_constant(rows);
        for (const std::string kind : {"gkp", "rsb"}) {
            std::map<double, double> series;
            for (const auto* r :
                 select(rows, [&](const ResultRow& r) { return r.kind == kind; }))
                series[r->nbar_code] = r->infidelity;
            if (series.empty())
                throw ConfigError("plot recipe fig10: no " + kind + " rows");
            std::vector<double> xs, ys;
            for (auto [x, y] : series) {
                xs.push_back(x);
                ys.push_back(y);
            }
            const std::string path = out_dir + "/fig10_" + kind + ".csv";
            write_panel(path, {"nbar", "infidelity", "break_even"},
                        {xs, ys, std::vector<double>(xs.size(), be)});
            written.push_back(path);
        }
    } else {
        throw ConfigError("unknown plot recipe: " + recipe +
                          " (known: fig5, fig6, fig9, fig10)");
    }
    return written;
}

}  // namespace bqec::runner

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qec3d/analysis.hpp"
#include "qec3d/codes.hpp"
#include "qec3d/decoders.hpp"
#include "qec3d/harness.hpp"
#include "qec3d/noise.hpp"

using nlohmann::ordered_json;
using namespace qec3d;

namespace {

// Bad flags or configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Missing or unusable data, I/O failures.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<int> parse_ints(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("not an integer list: '" + text + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty integer list");
    return out;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("not a number list: '" + text + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty number list");
    return out;
}

struct CodeSpec {
    std::string family = "surface3d-cubic";
    std::string boundary = "periodic";
    std::string deformation = "none";

    void add_flags(CLI::App* app) {
        app->add_option("--code", family, "code family")->required();
        app->add_option("--boundary", boundary, "boundary condition")->capture_default_str();
        app->add_option("--deformation", deformation, "deformation recipe name, 'standard' or 'none'")
            ->capture_default_str();
    }

    StabilizerCode build(const std::vector<int>& dims) const {
        try {
            auto code = build_code(family, dims, parse_boundary(boundary));
            if (deformation == "standard") {
                code = deform(code, standard_recipe(family));
            } else if (deformation != "none") {
                code = deform(code, recipe_by_name(deformation));
            }
            return code;
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << text;
    if (!out) throw DataError("write failed: " + path);
}

ordered_json weight_histogram(const StabilizerCode& code) {
    std::map<std::size_t, std::size_t> hist;
    for (const auto& s : code.stabilizers) ++hist[s.weight()];
    ordered_json j = ordered_json::object();
    for (const auto& [w, count] : hist) j[std::to_string(w)] = count;
    return j;
}

// ---------------------------------------------------------------------------

struct BuildArgs {
    CodeSpec code;
    std::string dims;
    std::string out;
};

int cmd_build(const BuildArgs& a) {
    const auto code = a.code.build(parse_ints(a.dims));
    const auto text = code_to_json(code);
    if (!a.out.empty()) write_file(a.out, text + "\n");
    ordered_json j;
    j["n"] = code.n;
    j["k"] = code.k();
    j["stabilizers"] = code.stabilizers.size();
    j["weights"] = weight_histogram(code);
    j["config_hash"] = hash_hex(text);
    j["version"] = kVersion;
    std::cout << j.dump() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct RunArgs {
    CodeSpec code;
    std::vector<std::string> dims;
    std::string sizes;
    std::string p;
    std::string eta = "0.5";
    std::string decoder = "bposd";
    int bp_iters = 32;
    std::string bp_mode = "min-sum";
    double normalization = 0.625;
    int osd_order = 50;
    std::string osd_method = "cs";
    double sweep_factor = 4.0;
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::size_t stop_after = 0;
    std::string out;
};

DecoderConfig decoder_config(const RunArgs& a) {
    DecoderConfig d;
    d.name = a.decoder;
    d.bp.max_iters = a.bp_iters;
    d.bp.normalization = a.normalization;
    if (a.bp_mode == "min-sum") {
        d.bp.mode = BpMode::min_sum;
    } else if (a.bp_mode == "sum-product") {
        d.bp.mode = BpMode::sum_product;
    } else {
        throw ConfigError("unknown bp mode '" + a.bp_mode + "'");
    }
    d.osd.order = a.osd_order;
    if (a.osd_method == "cs") {
        d.osd.method = OsdMethod::combination_sweep;
    } else if (a.osd_method == "osd0") {
        d.osd.method = OsdMethod::osd0;
    } else {
        throw ConfigError("unknown osd method '" + a.osd_method + "'");
    }
    d.sweep_tmax_factor = a.sweep_factor;
    return d;
}

ordered_json decoder_json(const RunArgs& a) {
    ordered_json j;
    j["name"] = a.decoder;
    if (a.decoder == "bposd") {
        j["bp_iters"] = a.bp_iters;
        j["bp_mode"] = a.bp_mode;
        j["normalization"] = a.normalization;
        j["osd_order"] = a.osd_order;
        j["osd_method"] = a.osd_method;
    } else if (a.decoder == "sweep-match") {
        j["sweep_tmax_factor"] = a.sweep_factor;
    }
    return j;
}

std::vector<std::vector<int>> run_dims(const RunArgs& a) {
    std::vector<std::vector<int>> out;
    for (const auto& d : a.dims) out.push_back(parse_ints(d));
    if (!a.sizes.empty()) {
        const bool planar = a.code.family.rfind("surface2d-", 0) == 0;
        for (int L : parse_ints(a.sizes)) out.push_back(planar ? std::vector<int>{L, L} : std::vector<int>{L, L, L});
    }
    if (out.empty()) throw ConfigError("run: give --dims or --sizes");
    return out;
}

std::set<std::string> completed_hashes(const std::string& path) {
    std::set<std::string> done;
    std::ifstream in(path);
    if (!in) return done;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            done.insert(record_from_ndjson(line).config_hash);
        } catch (const std::invalid_argument& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return done;
}

int cmd_run(const RunArgs& a) {
    double eta = 0;
    std::vector<double> ps;
    try {
        eta = parse_eta(a.eta);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    ps = parse_doubles(a.p);
    for (double p : ps) {
        if (p < 0 || p > 1) throw ConfigError("error rate outside [0, 1]");
    }
    const auto dcfg = decoder_config(a);
    const auto done = a.out.empty() ? std::set<std::string>{} : completed_hashes(a.out);
    std::ofstream out;
    if (!a.out.empty()) {
        out.open(a.out, std::ios::app);
        if (!out) throw DataError("cannot write " + a.out);
    }
    for (const auto& dims : run_dims(a)) {
        const auto code = a.code.build(dims);
        for (double p : ps) {
            ordered_json cfg;
            cfg["code"] = a.code.family;
            cfg["dims"] = dims;
            cfg["boundary"] = a.code.boundary;
            cfg["deformation"] = a.code.deformation;
            cfg["p"] = p;
            cfg["eta"] = format_eta(eta);
            cfg["decoder"] = decoder_json(a);
            cfg["n_trials"] = a.trials;
            cfg["seed"] = a.seed;
            cfg["stop_after_failures"] = a.stop_after;
            const auto hash = hash_hex(cfg.dump());
            if (done.count(hash)) continue;

            RunOptions opt;
            opt.n_trials = a.trials;
            opt.base_seed = a.seed;
            opt.workers = a.workers;
            if (a.stop_after > 0) opt.stop_after_failures = a.stop_after;
            TrialStats stats;
            try {
                stats = run_trials(code, resolve(p, eta), dcfg, opt);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            CellRecord r;
            r.config_hash = hash;
            r.seed = a.seed;
            r.code = a.code.family;
            for (std::size_t i = 0; i < dims.size() && i < 3; ++i) r.dims[i] = dims[i];
            r.boundary = a.code.boundary;
            r.deformation = a.code.deformation;
            r.p = p;
            r.eta = eta;
            r.decoder = a.decoder;
            r.stop_after_failures = opt.stop_after_failures;
            r.stats = stats;
            const auto line = to_ndjson(r);
            if (out.is_open()) {
                out << line << "\n" << std::flush;
                if (!out) throw DataError("write failed: " + a.out);
            }
            std::cout << line << "\n" << std::flush;
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct FitArgs {
    std::string in;
    std::string window;
    std::string sizes;
    std::size_t n_bs = 100;
    std::uint64_t seed = 1;
    std::string out;
    std::string csv;
};

ordered_json fit_json(const ThresholdFit& f) {
    ordered_json j;
    j["sector"] = to_string(f.sector);
    j["p_th"] = f.p_th;
    j["low"] = f.low;
    j["high"] = f.high;
    j["nu"] = f.nu;
    j["a"] = f.a;
    j["b"] = f.b;
    j["c"] = f.c;
    j["residual"] = f.residual;
    j["n_bootstrap"] = f.n_bootstrap;
    return j;
}

int cmd_fit(const FitArgs& a) {
    const auto text = read_file(a.in);
    std::vector<CellRecord> records;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        try {
            records.push_back(record_from_ndjson(line));
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what());
        }
    }
    FitWindow window;
    if (!a.window.empty()) {
        const auto w = parse_doubles(a.window);
        if (w.size() != 2 || w[0] >= w[1]) throw ConfigError("--window expects lo,hi");
        window = {w[0], w[1]};
    }
    std::set<int> keep;
    if (!a.sizes.empty()) {
        for (int L : parse_ints(a.sizes)) keep.insert(L);
    }
    std::set<std::string> groups;
    for (const auto& r : records) groups.insert(r.code + "/" + r.decoder + "/" + format_eta(r.eta));
    if (groups.size() > 1) throw DataError("fit: results mix several code/decoder/bias groups");

    ordered_json report;
    report["input"] = a.in;
    report["config_hash"] = hash_hex(text + "|" + a.window + "|" + a.sizes + "|" + std::to_string(a.n_bs) + "|" +
                                     std::to_string(a.seed));
    report["seed"] = a.seed;
    report["version"] = kVersion;
    report["window"] = {window.lo, window.hi};
    std::vector<ThresholdFit> fits;
    ordered_json sectors = ordered_json::array();
    std::map<FitSector, std::vector<DataCell>> cells_by_sector;
    for (auto sector : {FitSector::total, FitSector::x, FitSector::z}) {
        auto& cells = cells_by_sector[sector];
        for (const auto& r : records) {
            if (keep.empty() || keep.count(r.dims[0])) cells.push_back(data_cell(r, sector));
        }
        try {
            auto f = bootstrap_fit(cells, window, a.n_bs, a.seed);
            f.sector = sector;
            fits.push_back(f);
            sectors.push_back(fit_json(f));
        } catch (const std::invalid_argument& e) {
            throw DataError(std::string("fit: insufficient data: ") + e.what());
        }
    }
    report["sectors"] = sectors;
    const auto& best = select_min_sector(fits);
    report["threshold"] = fit_json(best);
    ordered_json col = ordered_json::array();
    for (const auto& pt : collapse(cells_by_sector[best.sector], best)) col.push_back({{"x", pt.x}, {"p_L", pt.p_l}, {"L", pt.L}});
    report["collapse"] = col;

    if (!a.csv.empty()) {
        std::ostringstream csv;
        csv << "p,L,n_trials,n_fail_total,mean_fail_x,mean_fail_z\n";
        for (const auto& r : records) {
            csv << r.p << "," << r.dims[0] << "," << r.stats.n_trials << "," << r.stats.n_fail_total << ","
                << r.stats.mean_fail_x() << "," << r.stats.mean_fail_z() << "\n";
        }
        write_file(a.csv, csv.str());
    }
    const auto dumped = report.dump(2);
    if (!a.out.empty()) write_file(a.out, dumped + "\n");
    std::cout << dumped << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct PropsArgs {
    CodeSpec code;
    std::string dims;
    int depth = 2;
    std::string out;
};

int cmd_props(const PropsArgs& a) {
    const auto code = a.code.build(parse_ints(a.dims));
    ordered_json j;
    j["code"] = a.code.family;
    j["dims"] = parse_ints(a.dims);
    j["n"] = code.n;
    j["k"] = code.k();
    j["weights"] = weight_histogram(code);
    j["split_depth"] = a.depth;
    try {
        j["x_girth"] = girth(code, CheckSector::x);
        j["z_girth"] = girth(code, CheckSector::z);
        j["x_split_belief"] = split_belief_number(code, CheckSector::x, a.depth);
        j["z_split_belief"] = split_belief_number(code, CheckSector::z, a.depth);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    j["config_hash"] = hash_hex(code_to_json(code) + "|" + std::to_string(a.depth));
    j["version"] = kVersion;
    const auto text = j.dump();
    if (!a.out.empty()) write_file(a.out, text + "\n");
    std::cout << text << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator for 3D topological codes under biased Pauli noise"};
    app.require_subcommand(1);

    BuildArgs build;
    auto* b = app.add_subcommand("build", "build a code and write it as JSON");
    build.code.add_flags(b);
    b->add_option("--dims", build.dims, "comma-separated dimensions")->required();
    b->add_option("--out", build.out, "output JSON path");

    RunArgs run;
    auto* r = app.add_subcommand("run", "Monte Carlo decoding, one NDJSON record per (size, p) cell");
    run.code.add_flags(r);
    r->add_option("--dims", run.dims, "dimensions, repeatable");
    r->add_option("--sizes", run.sizes, "comma-separated cubic sizes L");
    r->add_option("--p", run.p, "comma-separated physical error rates")->required();
    r->add_option("--eta", run.eta, "Z bias, number or 'inf'")->capture_default_str();
    r->add_option("--decoder", run.decoder, "bposd | symmetry | sweep-match | mwpm")->capture_default_str();
    r->add_option("--bp-iters", run.bp_iters)->capture_default_str();
    r->add_option("--bp-mode", run.bp_mode, "min-sum | sum-product")->capture_default_str();
    r->add_option("--normalization", run.normalization, "min-sum scaling")->capture_default_str();
    r->add_option("--osd-order", run.osd_order)->capture_default_str();
    r->add_option("--osd-method", run.osd_method, "cs | osd0")->capture_default_str();
    r->add_option("--sweep-tmax-factor", run.sweep_factor)->capture_default_str();
    r->add_option("--trials", run.trials)->capture_default_str();
    r->add_option("--seed", run.seed)->capture_default_str();
    r->add_option("--workers", run.workers)->capture_default_str();
    r->add_option("--stop-after-failures", run.stop_after, "0 disables early stopping")->capture_default_str();
    r->add_option("--out", run.out, "NDJSON output, appended and resumable");

    FitArgs fit;
    auto* f = app.add_subcommand("fit", "finite-size scaling fit of NDJSON results");
    f->add_option("--in", fit.in, "NDJSON results")->required();
    f->add_option("--window", fit.window, "lo,hi range of p used in the fit");
    f->add_option("--sizes", fit.sizes, "restrict to these sizes L");
    f->add_option("--bootstrap", fit.n_bs, "bootstrap resamples")->capture_default_str();
    f->add_option("--seed", fit.seed)->capture_default_str();
    f->add_option("--out", fit.out, "report JSON path");
    f->add_option("--csv", fit.csv, "CSV export of the cells");

    PropsArgs props;
    auto* p = app.add_subcommand("props", "girth, split-belief numbers and weights of a code");
    props.code.add_flags(p);
    p->add_option("--dims", props.dims, "comma-separated dimensions")->required();
    p->add_option("--depth", props.depth, "split-belief search depth")->capture_default_str();
    p->add_option("--out", props.out, "output JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        if (*b) return cmd_build(build);
        if (*r) return cmd_run(run);
        if (*f) return cmd_fit(fit);
        if (*p) return cmd_props(props);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

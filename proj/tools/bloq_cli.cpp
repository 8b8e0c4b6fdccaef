// Command-line front end: generate, inject, localize, experiment, report.
//
// Exit codes: 0 success, 2 configuration or input error, 3 trial failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bloq/bloq.hpp"

namespace {

using namespace bloq;

constexpr int kConfigError = 2;
constexpr int kTrialFailure = 3;

struct TrialFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << text;
}

ProgramSpec program_arg(const std::string& kind, unsigned n, std::string input) {
    if (input.empty()) input = std::string(n, '0');
    ProgramSpec p{parse_program_kind(kind, "--program"), n, input};
    p.validate();
    return p;
}

BackendConfig backend_arg(const std::string& name, std::uint64_t seed) {
    if (name == "ideal") return BackendConfig::ideal(seed);
    if (name == "noisy") return BackendConfig::noisy(seed);
    throw ValidationError("unknown backend '" + name + "'");
}

struct ProgramOptions {
    std::string program = "qft";
    unsigned n = 2;
    std::string input;

    void add(CLI::App* app) {
        app->add_option("--program", program, "qft or grover")->check(CLI::IsMember({"qft", "grover"}));
        app->add_option("--n", n, "qubit count");
        app->add_option("--input", input, "input (qft) or marked item (grover) bitstring; default all zeros");
    }
    ProgramSpec spec() const { return program_arg(program, n, input); }
};

int run(int argc, char** argv) {
    CLI::App app{"Fault localization for quantum programs with Bloch-vector assertions"};
    app.require_subcommand(1);

    // generate
    ProgramOptions gen_prog;
    bool gen_scheme = false;
    int indent = 2;
    std::string gen_out;
    auto* gen = app.add_subcommand("generate", "emit a program's circuit JSON (or its assertion scheme)");
    gen_prog.add(gen);
    gen->add_flag("--scheme", gen_scheme, "emit the AutoBloq assertion scheme instead of the circuit");
    gen->add_option("--indent", indent, "JSON indentation");
    gen->add_option("-o,--out", gen_out, "output file (default stdout)");

    // inject
    std::string inj_circuit, inj_fault, inj_out;
    bool inj_list = false;
    std::uint64_t inj_seed = 0;
    auto* inj = app.add_subcommand("inject", "apply a fault spec to a circuit, or list the fault catalog");
    inj->add_option("--circuit", inj_circuit, "circuit JSON file")->required();
    inj->add_option("--fault", inj_fault, "FaultSpec JSON file");
    inj->add_flag("--list", inj_list, "print the enumerated fault catalog instead of injecting");
    inj->add_option("--seed", inj_seed, "catalog seed for --list");
    inj->add_option("-o,--out", inj_out, "output file (default stdout)");

    // localize
    ProgramOptions loc_prog;
    std::string approach = "bloq", backend = "ideal", loc_fault;
    double threshold = 0.0;
    std::size_t shots = 8192;
    std::uint64_t seed = 0;
    auto* loc = app.add_subcommand("localize", "run one localization trial and print the verdict JSON");
    loc_prog.add(loc);
    loc->add_option("--approach", approach, "bloq or proq")->check(CLI::IsMember({"bloq", "proq"}));
    loc->add_option("--backend", backend, "ideal or noisy")->check(CLI::IsMember({"ideal", "noisy"}));
    loc->add_option("--threshold", threshold, "assessment threshold in percent");
    loc->add_option("--shots", shots, "shots per measured circuit (0 = exact expectations)");
    loc->add_option("--seed", seed, "sampling seed");
    loc->add_option("--fault", loc_fault, "FaultSpec JSON file to inject first");

    // experiment
    std::string exp_config, exp_out;
    unsigned exp_workers = 0;
    auto* exp = app.add_subcommand("experiment", "run the full experiment matrix from a config JSON");
    exp->add_option("--config", exp_config, "experiment config JSON")->required();
    exp->add_option("-o,--out", exp_out, "results CSV (default stdout)");
    exp->add_option("--workers", exp_workers, "override the config's worker count");

    // report
    std::string rep_results, rep_dir;
    std::size_t rep_resamples = 10000;
    std::uint64_t rep_seed = 0;
    auto* rep = app.add_subcommand("report", "aggregate results CSV into grouped statistics");
    rep->add_option("--results", rep_results, "results CSV")->required();
    rep->add_option("--out-dir", rep_dir, "write groups.csv, order.csv and report.json here (default: JSON to stdout)");
    rep->add_option("--resamples", rep_resamples, "bootstrap resamples");
    rep->add_option("--seed", rep_seed, "bootstrap seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    if (gen->parsed()) {
        const auto spec = gen_prog.spec();
        const auto text = gen_scheme ? autobloq::scheme_to_json(autobloq::build_scheme(spec)).dump(indent)
                                     : serialize(build_program(spec), indent);
        write_output(gen_out, text + "\n");
        return 0;
    }

    if (inj->parsed()) {
        const auto circuit = deserialize(read_file(inj_circuit));
        if (inj_list) {
            nlohmann::json list = nlohmann::json::array();
            for (const auto& f : faults::enumerate_faults(circuit, inj_seed)) list.push_back(faults::fault_to_json(f));
            write_output(inj_out, list.dump(indent) + "\n");
            return 0;
        }
        if (inj_fault.empty()) throw ValidationError("inject needs --fault or --list");
        const auto fault = faults::fault_from_json(bloq::detail::parse_document(read_file(inj_fault)));
        write_output(inj_out, serialize(faults::inject(circuit, fault), indent) + "\n");
        return 0;
    }

    if (loc->parsed()) {
        assertions::check_threshold(threshold);
        const auto spec = loc_prog.spec();
        const auto original = build_program(spec);
        const auto circuit =
            loc_fault.empty()
                ? original
                : faults::inject(original, faults::fault_from_json(bloq::detail::parse_document(read_file(loc_fault))));
        const auto b = backend_arg(backend, seed);
        assertions::LocalizationVerdict v;
        try {
            v = approach == "bloq" ? assertions::run_bloq(circuit, autobloq::build_scheme(spec), b, shots, threshold)
                                   : proq::run_proq(circuit, b, shots, threshold);
        } catch (const std::exception& e) {
            throw TrialFailure(e.what());
        }
        std::cout << assertions::verdict_to_json(v).dump(2) << "\n";
        return 0;
    }

    if (exp->parsed()) {
        auto cfg = eval::config_from_json(bloq::detail::parse_document(read_file(exp_config)));
        if (exp_workers > 0) cfg.workers = exp_workers;
        const auto records = eval::run_matrix(cfg);
        std::ostringstream csv;
        eval::write_csv(csv, records);
        write_output(exp_out, csv.str());
        std::size_t failed = 0;
        for (const auto& r : records) failed += !r.ok();
        if (failed > 0) {
            std::cerr << "bloq: " << failed << " of " << records.size() << " records failed\n";
            return kTrialFailure;
        }
        return 0;
    }

    if (rep->parsed()) {
        std::ifstream in(rep_results, std::ios::binary);
        if (!in) throw ValidationError("cannot open " + rep_results);
        const auto rows = eval::read_csv(in);
        eval::ReportOptions opt;
        opt.resamples = rep_resamples;
        opt.seed = rep_seed;
        std::vector<std::string> warnings;
        const auto groups = eval::report(rows, eval::default_groupings(), opt, &warnings);
        const auto order = eval::runtime_depth_stats(rows);
        for (const auto& w : warnings) std::cerr << "bloq: warning: " << w << "\n";
        const auto j = eval::report_to_json(groups, order, warnings);
        if (rep_dir.empty()) {
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        std::filesystem::create_directories(rep_dir);
        std::ostringstream g, o;
        eval::write_group_csv(g, groups);
        eval::write_order_csv(o, order);
        write_output(rep_dir + "/groups.csv", g.str());
        write_output(rep_dir + "/order.csv", o.str());
        write_output(rep_dir + "/report.json", j.dump(2) + "\n");
        return 0;
    }
    return kConfigError;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const TrialFailure& e) {
        std::cerr << "bloq: trial failed: " << e.what() << "\n";
        return kTrialFailure;
    } catch (const bloq::ParseError& e) {
        std::cerr << "bloq: parse error";
        if (!e.path().empty()) std::cerr << " at " << e.path();
        std::cerr << ": " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "bloq: " << e.what() << "\n";
        return kConfigError;
    }
}

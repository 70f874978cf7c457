#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>

#include "topstmin/topstmin.hpp"

namespace fs = std::filesystem;
using namespace topstmin;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Loaded {
    Instance inst;
    std::string id;
    std::string features;
};

Loaded load_instance(const fs::path& p) {
    const auto text = slurp(p);
    return {parse_any_instance(text), p.stem().string(), features_from_text(text)};
}

int cmd_solve(const std::string& algo_name, const std::vector<std::string>& params, const std::string& out,
              const std::string& record_path, const std::string& instance_path) {
    const auto algo = parse_algo(algo_name);
    const auto ld = load_instance(instance_path);
    const auto cfg = make_config(algo, ld.inst.n(), parse_params(params));
    const auto res = run_algorithm(ld.inst, cfg, ld.id, ld.features);
    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot write " + out);
        write_solution(f, res.solution, ld.inst);
    }
    const auto line = to_record_line(res.record);
    if (!record_path.empty()) {
        std::ofstream f(record_path, std::ios::app);
        if (!f) throw std::runtime_error("cannot write " + record_path);
        f << line << '\n';
    }
    std::cout << line << '\n';
    if (!res.note.empty()) std::cerr << "note: " << res.note << '\n';
    return res.record.feasible ? 0 : 2;
}

int cmd_generate(const std::string& mandatory, const std::string& phys, const std::string& logic, std::uint64_t seed,
                 double mf, double pf, double lf, const std::string& base_path, const std::string& out) {
    GenConfig g;
    if (mandatory == "cm") g.mandatory_mode = MandatoryMode::Clustered;
    else if (mandatory == "sm") g.mandatory_mode = MandatoryMode::Scattered;
    else throw std::invalid_argument("--mandatory must be cm or sm");
    if (phys == "cpi") g.phys_mode = PhysMode::ClustersBased;
    else if (phys == "dpi") g.phys_mode = PhysMode::DegreeBased;
    else throw std::invalid_argument("--phys must be cpi or dpi");
    if (logic == "fli") g.logic_mode = LogicMode::Farthest;
    else if (logic == "nli") g.logic_mode = LogicMode::Nearest;
    else if (!logic.empty()) throw std::invalid_argument("--logic must be fli or nli");
    g.mandatory_fraction = mf;
    g.edge_removal_fraction = pf;
    g.logic_fraction = lf;
    g.rng_seed = seed;

    const auto base = parse_any_instance(slurp(base_path));
    const auto inst = generate_features(base, g);
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    const auto label = feature_label(g);
    f << "# features " << label << '\n';
    write_extended_instance(f, inst);
    std::cout << "features " << label << " n=" << inst.n() << " mandatory=" << inst.data().mandatory.size()
              << " forbidden_arcs=" << inst.data().phys.size() << " logical_pairs=" << inst.data().logic.size() << '\n';
    return 0;
}

// Manifest lines: INSTANCE ALGO [key=value ...]; paths are relative to the manifest.
int cmd_bench(const std::string& manifest, const std::string& outdir, int jobs) {
    struct Job {
        fs::path instance;
        Algo algo;
        std::vector<std::string> params;
    };
    std::vector<Job> list;
    {
        std::istringstream in(slurp(manifest));
        std::string line;
        int no = 0;
        while (std::getline(in, line)) {
            ++no;
            std::istringstream ls(line);
            std::string path, algo;
            if (!(ls >> path) || path[0] == '#') continue;
            if (!(ls >> algo)) throw std::runtime_error("manifest line " + std::to_string(no) + ": missing algorithm");
            Job j{fs::path(path).is_absolute() ? fs::path(path) : fs::path(manifest).parent_path() / path, parse_algo(algo),
                  {}};
            for (std::string kv; ls >> kv;) j.params.push_back(kv);
            list.push_back(std::move(j));
        }
    }
    fs::create_directories(outdir);
    std::vector<std::string> lines(list.size());
    std::vector<std::string> errors(list.size());
    std::mutex print_mu;
    parallel_for(static_cast<int>(list.size()), std::max(1, jobs), [&](int i) {
        try {
            const auto& j = list[i];
            const auto ld = load_instance(j.instance);
            const auto cfg = make_config(j.algo, ld.inst.n(), parse_params(j.params));
            const auto res = run_algorithm(ld.inst, cfg, ld.id, ld.features);
            std::string algo = to_string(j.algo);
            std::ofstream(fs::path(outdir) / (ld.id + "." + algo + ".sol")) << to_solution_text(res.solution, ld.inst);
            lines[i] = to_record_line(res.record);
            std::lock_guard lock(print_mu);
            std::cout << lines[i] << '\n';
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    std::ofstream rec(fs::path(outdir) / "records.txt");
    int failed = 0;
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (!errors[i].empty()) {
            ++failed;
            std::cerr << list[i].instance.string() << ": " << errors[i] << '\n';
            continue;
        }
        rec << lines[i] << '\n';
    }
    return failed ? 1 : 0;
}

int cmd_report(const std::string& a, const std::string& b, double cpu_scale) {
    std::ifstream fa(a), fb(b);
    if (!fa) throw std::runtime_error("cannot read " + a);
    if (!fb) throw std::runtime_error("cannot read " + b);
    const auto rep = compute_gaps(read_records(fa), read_records(fb), cpu_scale);
    write_report(std::cout, rep);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TOP-ST-MIN solver and benchmark tool"};
    app.require_subcommand(1);

    std::string algo, out, record, instance;
    std::vector<std::string> params;
    auto* solve = app.add_subcommand("solve", "solve one instance");
    solve->add_option("--algo", algo, "mnaa | vnd | csh-st | csh-mt")->required();
    solve->add_option("--params", params, "key=value overrides");
    solve->add_option("--out", out, "solution output file");
    solve->add_option("--record", record, "append the run record to this file");
    solve->add_option("instance", instance, "instance file")->required();

    std::string mandatory, phys, logic, base, gen_out;
    std::uint64_t seed = 1;
    double mf = 0.05, pf = 0.20, lf = 0.05;
    auto* gen = app.add_subcommand("generate", "add mandatory nodes and incompatibilities to a base instance");
    gen->add_option("--mandatory", mandatory, "cm | sm")->required();
    gen->add_option("--phys", phys, "cpi | dpi")->required();
    gen->add_option("--logic", logic, "fli | nli (omit for physical only)");
    gen->add_option("--seed", seed, "random seed");
    gen->add_option("--mandatory-fraction", mf, "share of customers made mandatory");
    gen->add_option("--arc-fraction", pf, "share of customer arcs removed");
    gen->add_option("--logic-fraction", lf, "logical pairs per customer");
    gen->add_option("base", base, "base instance")->required();
    gen->add_option("out", gen_out, "output file")->required();

    std::string manifest, outdir;
    int jobs = 1;
    auto* bench = app.add_subcommand("bench", "run every line of a manifest");
    bench->add_option("manifest", manifest, "lines: INSTANCE ALGO [key=value ...]")->required();
    bench->add_option("outdir", outdir, "output directory")->required();
    bench->add_option("--jobs", jobs, "concurrent runs");

    std::string rec_a, rec_b;
    double cpu_scale = 1.0;
    auto* report = app.add_subcommand("report", "gap tables of record set A against B");
    report->add_option("a", rec_a, "records of method A")->required();
    report->add_option("b", rec_b, "records of reference method B")->required();
    report->add_option("--cpu-scale", cpu_scale, "multiplier applied to B's CPU times");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*solve) return cmd_solve(algo, params, out, record, instance);
        if (*gen) return cmd_generate(mandatory, phys, logic, seed, mf, pf, lf, base, gen_out);
        if (*bench) return cmd_bench(manifest, outdir, jobs);
        if (*report) return cmd_report(rec_a, rec_b, cpu_scale);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

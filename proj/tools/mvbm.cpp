// Command-line front end: solve instances, run strategic analyses, sweep
// instance families, and dump named fixtures. All numbers cross the
// interface as exact rational strings ("num/den"); exit code 0 = run
// completed (verdicts are payload), 1 = bad input, 2 = enumeration cap hit.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mvbm/errors.hpp"
#include "mvbm/fixtures.hpp"
#include "mvbm/instance.hpp"
#include "mvbm/mechanisms.hpp"
#include "mvbm/oracle.hpp"
#include "mvbm/strategy.hpp"

namespace {

using nlohmann::json;
using namespace mvbm;

json rationals_json(const std::vector<Rational>& xs) {
    json arr = json::array();
    for (const auto& x : xs) arr.push_back(x.str());
    return arr;
}

json report_json(const Report& r) {
    json j;
    j["declared_edges"] = r.declared_edges;
    if (!r.declared_capacities.empty()) j["declared_capacities"] = r.declared_capacities;
    return j;
}

Report report_from_json(const json& j) {
    if (!j.is_object() || !j.contains("declared_edges")) {
        throw ParseError("profile JSON must be an object with a declared_edges array");
    }
    Report r;
    r.declared_edges = j.at("declared_edges").get<std::vector<std::vector<TaskId>>>();
    if (j.contains("declared_capacities")) {
        r.declared_capacities = j.at("declared_capacities").get<std::vector<int>>();
    }
    return r;
}

json load_json_file(const std::string& path) {
    if (path == "-") return json::parse(std::cin);
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    return json::parse(in);
}

// Instance source selection shared by solve/analyze: exactly one of
// --file/--fixture/--generate, plus the fixture/generator knobs.
struct SourceFlags {
    std::string file;
    std::string fixture_name;
    std::string generate_spec;
    std::string eps = "1/100";
    std::uint64_t seed = 0;
    int n = 4;
    int m = 4;
    int b_max = 2;

    void attach(CLI::App* cmd) {
        cmd->add_option("--file", file, "instance JSON file ('-' = stdin)");
        cmd->add_option("--fixture", fixture_name, "named fixture id (see `fixtures list`)");
        cmd->add_option("--generate", generate_spec,
                        "random instance spec: key=value pairs joined by commas "
                        "(seed,n,m,b_max,density,value_mode)");
        cmd->add_option("--eps", eps, "gap parameter for eps fixtures (exact rational)");
        cmd->add_option("--seed", seed, "seed for family fixtures");
        cmd->add_option("--n", n, "agent count for family fixtures");
        cmd->add_option("--m", m, "task count for family fixtures");
        cmd->add_option("--b-max", b_max, "capacity bound for family fixtures");
    }

    std::pair<Instance, std::string> resolve() const {
        const int given = (!file.empty()) + (!fixture_name.empty()) + (!generate_spec.empty());
        if (given != 1) {
            throw ParseError("exactly one of --file / --fixture / --generate is required");
        }
        if (!file.empty()) {
            return {Instance::from_json(load_json_file(file)), "file:" + file};
        }
        if (!fixture_name.empty()) {
            FixtureId id = parse_fixture_id(fixture_name);
            FixtureParams params;
            params.eps = Rational::parse(eps);
            params.seed = seed;
            params.n = n;
            params.m = m;
            params.b_max = b_max;
            std::string label = fixture_name;
            if (id == FixtureId::thm3_tightness || id == FixtureId::thm8_poa ||
                id == FixtureId::thm9_lower_bound) {
                label += "(eps=" + params.eps.str() + ")";
            } else if (id == FixtureId::degree_leq_capacity_family ||
                       id == FixtureId::complete_contested_family) {
                label += "(seed=" + std::to_string(seed) + ")";
            }
            return {fixture(id, params), label};
        }
        RandomInstanceParams params;
        std::stringstream ss{generate_spec};
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                throw ParseError("bad --generate item (want key=value): '" + item + "'");
            }
            const std::string key = item.substr(0, eq);
            const std::string value = item.substr(eq + 1);
            try {
                if (key == "seed") params.seed = std::stoull(value);
                else if (key == "n") params.n = std::stoi(value);
                else if (key == "m") params.m = std::stoi(value);
                else if (key == "b_max") params.b_max = std::stoi(value);
                else if (key == "density") params.density = Rational::parse(value);
                else if (key == "value_mode") params.value_mode = parse_value_mode(value);
                else throw ParseError("unknown --generate key: '" + key + "'");
            } catch (const std::invalid_argument&) {
                throw ParseError("bad --generate value for '" + key + "': '" + value + "'");
            } catch (const std::out_of_range&) {
                throw ParseError("bad --generate value for '" + key + "': '" + value + "'");
            }
        }
        return {random_instance(params), "generate:" + generate_spec};
    }
};

int cmd_solve(const SourceFlags& src, const std::string& mech_name, const std::string& mode_name,
              const std::string& report_file) {
    auto [inst, label] = src.resolve();
    const Mechanism mech = parse_mechanism(mech_name);
    const Mode mode = parse_mode(mode_name);
    Report report =
        report_file.empty() ? Report::truthful(inst) : report_from_json(load_json_file(report_file));
    Outcome out = run_mechanism(inst, report, mode, mech);

    json j;
    j["instance_id"] = label;
    j["mechanism"] = to_string(mech);
    j["mode"] = to_string(mode);
    j["matching"] = out.matching.to_json();
    j["utilities"] = rationals_json(out.utils.per_agent);
    j["welfare"] = out.utils.total.str();
    std::cout << j.dump(2) << "\n";
    return 0;
}

json deviation_json(const Deviation& dev) {
    json w;
    w["agent"] = dev.agent;
    w["declared_edges"] = dev.edges;
    w["declared_capacity"] = dev.capacity;
    w["old_utility"] = dev.old_utility.str();
    w["new_utility"] = dev.new_utility.str();
    w["gain"] = dev.gain.str();
    return w;
}

int cmd_analyze(const SourceFlags& src, const std::string& mech_name,
                const std::string& mode_name, const std::string& check, std::uint64_t cap,
                int max_coalition, const std::string& profile_file) {
    auto [inst, label] = src.resolve();
    const Mechanism mech = parse_mechanism(mech_name);
    const Mode mode = parse_mode(mode_name);

    json j;
    j["check"] = check;
    j["instance_id"] = label;
    j["mechanism"] = to_string(mech);
    j["mode"] = to_string(mode);

    if (check == "truthful") {
        auto dev = check_truthfulness(inst, mech, mode, cap);
        j["verdict"] = dev ? "manipulable" : "truthful";
        if (dev) j["witness"] = deviation_json(*dev);
    } else if (check == "group-sp") {
        auto witness = check_group_sp(inst, mech, mode, max_coalition, cap);
        j["verdict"] = witness ? "manipulable" : "group_sp";
        if (witness) {
            json w;
            w["coalition"] = witness->coalition;
            w["declarations"] = witness->declarations;
            w["capacities"] = witness->capacities;
            w["old_utilities"] = rationals_json(witness->old_utilities);
            w["new_utilities"] = rationals_json(witness->new_utilities);
            j["witness"] = w;
        }
    } else if (check == "ne") {
        Report profile = profile_file.empty() ? fcfs_policies(inst).as_report()
                                              : report_from_json(load_json_file(profile_file));
        j["profile"] = report_json(profile);
        j["profile_source"] = profile_file.empty() ? "fcfs" : profile_file;
        auto verdict = verify_nash(inst, profile, mech, mode, cap);
        j["verdict"] = verdict.is_ne ? "equilibrium" : "not_equilibrium";
        if (verdict.deviation) j["witness"] = deviation_json(*verdict.deviation);
    } else if (check == "poa" || check == "pos") {
        auto res = empirical_poa_pos(inst, mech, mode, cap);
        j["verdict"] = "computed";
        json r;
        r["optimum"] = res.optimum.str();
        r["ne_count"] = res.ne_count;
        if (res.ne_count > 0) {
            r["min_ne_welfare"] = res.min_ne_welfare.str();
            r["max_ne_welfare"] = res.max_ne_welfare.str();
        }
        r["poa_ratio"] = res.poa.str();
        r["pos_ratio"] = res.pos.str();
        j["ratios"] = r;
    } else {  // classes
        auto rep = classify_truthful_inputs(inst);
        j["verdict"] = "computed";
        j["classes"] = {{"degree_leq_capacity", rep.degree_leq_capacity},
                        {"every_task_contested", rep.every_task_contested},
                        {"class_condition", rep.class_condition}};
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

// One sweep-output row; every rational is already rendered to its canonical
// string so rows can be emitted as CSV or JSON without re-deriving anything.
struct SweepRow {
    std::string instance_id;
    int n = 0;
    int m = 0;
    std::string welfare_bfs, welfare_dfs, welfare_ap, optimum, ap_ratio, poa, pos;
    bool truthful_ap = false;
    std::uint64_t ne_count = 0;
};

SweepRow make_row(const Instance& inst, std::string instance_id, std::uint64_t cap) {
    SweepRow row;
    row.instance_id = std::move(instance_id);
    row.n = inst.num_agents();
    row.m = inst.num_tasks();
    const Rational w_bfs = run_truthful(inst, Mechanism::bfs).utils.total;
    const Rational w_dfs = run_truthful(inst, Mechanism::dfs).utils.total;
    const Rational w_ap = run_truthful(inst, Mechanism::ap).utils.total;
    const Rational opt = brute_force_welfare(inst.edges, inst.capacities, inst.values, cap);
    row.welfare_bfs = w_bfs.str();
    row.welfare_dfs = w_dfs.str();
    row.welfare_ap = w_ap.str();
    row.optimum = opt.str();
    row.ap_ratio = (opt.is_zero() ? Rational(1) : opt / w_ap).str();
    const auto pp = empirical_poa_pos(inst, Mechanism::bfs, Mode::ems, cap);
    row.poa = pp.poa.str();
    row.pos = pp.pos.str();
    row.ne_count = pp.ne_count;
    row.truthful_ap = !check_truthfulness(inst, Mechanism::ap, Mode::ems, cap).has_value();
    return row;
}

constexpr const char* kSweepHeader =
    "instance_id,n,m,welfare_bfs,welfare_dfs,welfare_ap,optimum,ap_ratio,poa,pos,truthful_ap,"
    "ne_count";

void emit_rows(const std::vector<SweepRow>& rows, const std::string& out_format) {
    if (out_format == "csv") {
        std::cout << kSweepHeader << "\n";
        for (const auto& r : rows) {
            std::cout << r.instance_id << ',' << r.n << ',' << r.m << ',' << r.welfare_bfs << ','
                      << r.welfare_dfs << ',' << r.welfare_ap << ',' << r.optimum << ','
                      << r.ap_ratio << ',' << r.poa << ',' << r.pos << ','
                      << (r.truthful_ap ? "true" : "false") << ',' << r.ne_count << "\n";
        }
        return;
    }
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"instance_id", r.instance_id},
                       {"n", r.n},
                       {"m", r.m},
                       {"welfare_bfs", r.welfare_bfs},
                       {"welfare_dfs", r.welfare_dfs},
                       {"welfare_ap", r.welfare_ap},
                       {"optimum", r.optimum},
                       {"ap_ratio", r.ap_ratio},
                       {"poa", r.poa},
                       {"pos", r.pos},
                       {"truthful_ap", r.truthful_ap},
                       {"ne_count", r.ne_count}});
    }
    std::cout << arr.dump(2) << "\n";
}

int cmd_sweep(int n_max, int m_max, int b_max, const std::string& values_csv,
              const std::string& family, const std::string& eps_list, std::uint64_t cap,
              int jobs, const std::string& out_format) {
    std::vector<SweepRow> rows;

    if (!family.empty()) {
        if (family != "thm3") throw ParseError("unknown sweep family: '" + family + "'");
        if (eps_list.empty()) throw ParseError("--family thm3 requires --eps-list");
        std::stringstream ss{eps_list};
        std::string item;
        while (std::getline(ss, item, ',')) {
            FixtureParams params;
            params.eps = Rational::parse(item);
            Instance inst = fixture(FixtureId::thm3_tightness, params);
            rows.push_back(make_row(inst, "thm3(eps=" + params.eps.str() + ")", cap));
        }
        emit_rows(rows, out_format);
        return 0;
    }

    SweepLimits limits;
    limits.n_max = n_max;
    limits.m_max = m_max;
    limits.b_max = b_max;
    if (!values_csv.empty()) {
        limits.values.clear();
        std::stringstream ss{values_csv};
        std::string item;
        while (std::getline(ss, item, ',')) limits.values.push_back(Rational::parse(item));
    }
    const std::uint64_t count = sweep_count(limits);
    rows.resize(count);

    if (jobs < 1) jobs = 1;
    // Deterministic parallelism: workers own index classes mod `jobs` and
    // write into preallocated slots; output order is by instance index.
    std::vector<std::exception_ptr> errors(static_cast<size_t>(jobs));
    auto worker = [&](int t) {
        try {
            for (std::uint64_t idx = static_cast<std::uint64_t>(t); idx < count;
                 idx += static_cast<std::uint64_t>(jobs)) {
                Instance inst = sweep_instance(limits, idx);
                rows[idx] = make_row(inst, std::to_string(idx), cap);
            }
        } catch (...) {
            errors[static_cast<size_t>(t)] = std::current_exception();
        }
    };
    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }

    emit_rows(rows, out_format);
    return 0;
}

int cmd_fixtures_list() {
    json arr = json::array();
    for (FixtureId id : all_fixture_ids()) {
        arr.push_back({{"id", to_string(id)}, {"description", fixture_description(id)}});
    }
    std::cout << arr.dump(2) << "\n";
    return 0;
}

int cmd_fixtures_dump(const std::string& name, const std::string& eps, std::uint64_t seed, int n,
                      int m, int b_max) {
    FixtureParams params;
    params.eps = Rational::parse(eps);
    params.seed = seed;
    params.n = n;
    params.m = m;
    params.b_max = b_max;
    Instance inst = fixture(parse_fixture_id(name), params);
    std::cout << inst.to_json().dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximum vertex-weighted b-matching: mechanisms and strategic analysis"};
    app.require_subcommand(1);

    std::string mech_name = "bfs";
    std::string mode_name = "ems";
    std::uint64_t cap = 0;  // 0 = library default
    int max_coalition = 3;
    int jobs = 1;

    auto* solve = app.add_subcommand("solve", "run a mechanism and print the matching");
    SourceFlags solve_src;
    solve_src.attach(solve);
    std::string solve_report;
    solve->add_option("--mech", mech_name, "mechanism: bfs|dfs|ap");
    solve->add_option("--mode", mode_name, "declaration mode: ems|ecms");
    solve->add_option("--report", solve_report, "declared profile JSON file (default truthful)");

    auto* analyze = app.add_subcommand("analyze", "run a strategic check and print the verdict");
    SourceFlags analyze_src;
    analyze_src.attach(analyze);
    std::string check;
    std::string profile_file;
    analyze->add_option("--mech", mech_name, "mechanism: bfs|dfs|ap");
    analyze->add_option("--mode", mode_name, "declaration mode: ems|ecms");
    analyze
        ->add_option("--check", check,
                     "what to verify: truthful|group-sp|ne|poa|pos|classes")
        ->required()
        ->check(CLI::IsMember({"truthful", "group-sp", "ne", "poa", "pos", "classes"}));
    analyze->add_option("--cap", cap, "enumeration cap (default MVBM_CAP_DEFAULT or 100000)");
    analyze->add_option("--max-coalition", max_coalition, "largest coalition size for group-sp");
    analyze->add_option("--profile", profile_file,
                        "profile JSON for --check ne (default: the FCFS profile)");

    auto* sweep = app.add_subcommand("sweep", "emit per-instance metrics over a family (CSV)");
    int n_max = 3, m_max = 3, b_max_sweep = 2;
    std::string values_csv, family, eps_list, out_format = "csv";
    sweep->add_option("--n-max", n_max, "max agent count");
    sweep->add_option("--m-max", m_max, "max task count");
    sweep->add_option("--b-max", b_max_sweep, "max capacity");
    sweep->add_option("--values", values_csv, "comma-separated task value pool (default 1,1/2,1/4)");
    sweep->add_option("--family", family, "named family instead of the exhaustive grid: thm3");
    sweep->add_option("--eps-list", eps_list, "comma-separated eps values for --family thm3");
    sweep->add_option("--cap", cap, "enumeration cap (default MVBM_CAP_DEFAULT or 100000)");
    sweep->add_option("--jobs", jobs, "worker threads (output order unchanged)");
    sweep->add_option("--out", out_format, "output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* fixtures_cmd = app.add_subcommand("fixtures", "list or dump named fixtures");
    fixtures_cmd->require_subcommand(1);
    auto* fx_list = fixtures_cmd->add_subcommand("list", "list fixture ids");
    auto* fx_dump = fixtures_cmd->add_subcommand("dump", "print a fixture instance as JSON");
    std::string dump_id;
    std::string dump_eps = "1/100";
    std::uint64_t dump_seed = 0;
    int dump_n = 4, dump_m = 4, dump_b_max = 2;
    fx_dump->add_option("id", dump_id, "fixture id")->required();
    fx_dump->add_option("--eps", dump_eps, "gap parameter for eps fixtures");
    fx_dump->add_option("--seed", dump_seed, "seed for family fixtures");
    fx_dump->add_option("--n", dump_n, "agent count for family fixtures");
    fx_dump->add_option("--m", dump_m, "task count for family fixtures");
    fx_dump->add_option("--b-max", dump_b_max, "capacity bound for family fixtures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cap == 0) cap = default_enumeration_cap();
        if (*solve) return cmd_solve(solve_src, mech_name, mode_name, solve_report);
        if (*analyze) {
            return cmd_analyze(analyze_src, mech_name, mode_name, check, cap, max_coalition,
                               profile_file);
        }
        if (*sweep) {
            return cmd_sweep(n_max, m_max, b_max_sweep, values_csv, family, eps_list, cap, jobs,
                             out_format);
        }
        if (*fx_list) return cmd_fixtures_list();
        if (*fx_dump) {
            return cmd_fixtures_dump(dump_id, dump_eps, dump_seed, dump_n, dump_m, dump_b_max);
        }
        std::cerr << "error: no subcommand selected\n";
        return 1;
    } catch (const CapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

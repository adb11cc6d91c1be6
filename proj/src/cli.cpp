#include "jointlab/cli.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"

#include "jointlab/errors.hpp"
#include "jointlab/generators.hpp"
#include "jointlab/harness.hpp"
#include "jointlab/io.hpp"
#include "jointlab/joints.hpp"
#include "jointlab/partition.hpp"
#include "jointlab/random.hpp"

namespace jointlab {

namespace fs = std::filesystem;

namespace {

// A manifest lists family files relative to its own directory; anything
// else is read as a single family.
std::vector<FlatFamily> load_families(const std::vector<std::string>& paths) {
    std::vector<FlatFamily> families;
    for (const auto& p : paths) {
        json j = read_json_file(p);
        if (j.is_object() && j.contains("families")) {
            fs::path dir = fs::path(p).parent_path();
            for (const auto& name : j.at("families"))
                families.push_back(read_json_file(dir / name.get<std::string>()).get<FlatFamily>());
        } else {
            families.push_back(j.get<FlatFamily>());
        }
    }
    if (families.empty()) throw PreconditionError("no families given");
    return families;
}

std::string format_double(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

struct GenerateArgs {
    std::string kind = "grid_lines";
    std::size_t n = 3;
    std::size_t side = 2;
    std::vector<std::size_t> alphas;
    std::vector<std::size_t> multiplicities;
    std::size_t count = 10;
    std::int64_t bound = 5;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

void run_generate(const GenerateArgs& a, std::ostream& out) {
    std::vector<FlatFamily> families;
    json params;
    if (a.kind == "grid_lines") {
        families = grid_lines(a.n, a.side);
        params = {{"n", a.n}, {"S", a.side}};
    } else if (a.kind == "grid_flats") {
        families = grid_flats(a.alphas.size(), a.alphas, a.side);
        params = {{"alphas", a.alphas}, {"S", a.side}};
    } else if (a.kind == "bush") {
        families = bush_config(a.n, a.multiplicities, a.seed);
        params = {{"n", a.n}, {"multiplicities", a.multiplicities}, {"seed", a.seed}};
    } else if (a.kind == "random") {
        if (a.alphas.empty()) throw PreconditionError("random: --alphas is required");
        std::size_t n = 0;
        for (auto al : a.alphas) n += al;
        for (std::size_t i = 0; i < a.alphas.size(); ++i)
            families.push_back(random_flats(n, a.alphas[i], a.count, a.bound, mix_seed(a.seed, i)));
        params = {{"alphas", a.alphas}, {"count", a.count}, {"bound", a.bound}, {"seed", a.seed}};
    } else {
        throw PreconditionError("unknown generator \"" + a.kind + "\"");
    }
    fs::path dir(a.out_dir);
    if (!fs::is_directory(dir)) throw PreconditionError("output directory " + dir.string() + " does not exist");
    json manifest = {{"kind", a.kind}, {"params", params}, {"families", json::array()}};
    for (std::size_t i = 0; i < families.size(); ++i) {
        std::string name = "family_" + std::to_string(i) + ".json";
        write_json_file(dir / name, families[i]);
        manifest["families"].push_back(name);
    }
    write_json_file(dir / "manifest.json", manifest);
    out << "wrote " << families.size() << " families to " << dir.string() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact joints counting and polynomial partitioning experiments", "jointlab"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write generated flat families and a manifest");
    generate->add_option("--kind", gen.kind, "grid_lines, grid_flats, bush or random")->capture_default_str();
    generate->add_option("--n", gen.n, "Ambient dimension")->capture_default_str();
    generate->add_option("-S,--side", gen.side, "Grid side length")->capture_default_str();
    generate->add_option("--alphas", gen.alphas, "Flat dimension per family")->delimiter(',');
    generate->add_option("--multiplicities", gen.multiplicities, "Lines per family (bush)")->delimiter(',');
    generate->add_option("--count", gen.count, "Flats per family (random)")->capture_default_str();
    generate->add_option("--bound", gen.bound, "Coordinate bound (random)")->capture_default_str();
    generate->add_option("--seed", gen.seed)->capture_default_str();
    generate->add_option("-o,--out-dir", gen.out_dir, "Existing output directory")->capture_default_str();

    std::vector<std::string> family_files;
    std::string strategy = "accelerated";
    bool all_members = false;
    std::string joints_out;
    auto* count = app.add_subcommand("count", "Count joints of one flat from each family");
    count->add_option("families", family_files, "Family JSON files or a manifest")->required();
    count->add_option("--strategy", strategy, "naive or accelerated")
        ->check(CLI::IsMember({"naive", "accelerated"}))
        ->capture_default_str();
    count->add_flag("--all-members", all_members, "Count every member through a joint in N_i");
    count->add_option("--output", joints_out, "Write the joint set as JSON");

    auto* carbery = app.add_subcommand("carbery", "Sum of (prod_i N_i)^(1/(n-1)) over joints of n line families");
    carbery->add_option("families", family_files, "Family JSON files or a manifest")->required();

    auto* transversal = app.add_subcommand("transversal", "Check that every concurrent cross-family tuple spans");
    transversal->add_option("families", family_files, "Family JSON files or a manifest")->required();

    std::size_t degree = 4;
    std::string tolerance = "0.1";
    std::uint64_t seed = 0;
    std::string input, output;
    auto* partition = app.add_subcommand("partition", "Partition a point set by a product of bisecting polynomials");
    partition->add_option("--degree", degree, "Degree budget D")->capture_default_str();
    partition->add_option("--tolerance", tolerance, "Per-step imbalance tolerance")->capture_default_str();
    partition->add_option("--seed", seed)->capture_default_str();
    partition->add_option("--input", input, "Points JSON: list of coordinate lists")->required();
    partition->add_option("--output", output, "Partition JSON")->required();

    std::string partition_file, line_file;
    auto* crossings = app.add_subcommand("crossings", "Number of intervals a line is cut into by a partition's zero set");
    crossings->add_option("--partition", partition_file, "Partition JSON")->required();
    crossings->add_option("--line", line_file, "Line JSON (a one-dimensional flat)")->required();

    std::size_t demo_n = 3, demo_side = 3;
    auto* demo = app.add_subcommand("demo-recursion", "One partitioning step over the joints of grid lines");
    demo->add_option("families", family_files, "Line families (default: grid_lines(n, S))");
    demo->add_option("--n", demo_n)->capture_default_str();
    demo->add_option("-S,--side", demo_side)->capture_default_str();
    demo->add_option("--degree", degree)->capture_default_str();
    demo->add_option("--tolerance", tolerance)->capture_default_str();
    demo->add_option("--seed", seed)->capture_default_str();

    std::string config_file, format;
    std::optional<std::uint64_t> seed_override;
    bool no_timing = false;
    auto* experiment = app.add_subcommand("experiment", "Run an experiment ladder from a JSON config");
    experiment->add_option("--config", config_file, "Experiment config JSON")->required();
    experiment->add_option("--seed", seed_override, "Run with this single seed instead of the config's");
    experiment->add_option("--output", output, "Results path (overrides the config)");
    experiment->add_option("--format", format, "csv or json (overrides the config)")
        ->check(CLI::IsMember({"csv", "json"}));
    experiment->add_flag("--no-timing", no_timing, "Leave wall_ms blank so output is reproducible");

    std::string x_field = "total_size", y_field = "joints";
    auto* fit = app.add_subcommand("fit", "Fit log(y) against log(x) over a results file");
    fit->add_option("--input", input, "Results CSV or JSON")->required();
    fit->add_option("-x", x_field)->capture_default_str();
    fit->add_option("-y", y_field)->capture_default_str();
    std::string kind_filter;
    fit->add_option("--kind", kind_filter, "Only rows of this experiment kind");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        if (*generate) {
            run_generate(gen, out);
        } else if (*count) {
            auto families = load_families(family_files);
            JointOptions opts;
            opts.strategy = strategy == "naive" ? JointStrategy::naive : JointStrategy::accelerated;
            if (all_members) opts.multiplicity = MultiplicityConvention::all_members;
            JointSet js = find_joints(families, opts);
            if (!joints_out.empty()) write_json_file(joints_out, js);
            out << js.size() << "\n";
        } else if (*carbery) {
            auto families = load_families(family_files);
            auto cs = carbery_sum(find_joints(families), families.size());
            out << format_double(cs.value) << " +/- " << format_double(cs.error_bound) << "\n";
        } else if (*transversal) {
            auto report = is_transversal(load_families(family_files));
            if (report.transversal) {
                out << "transversal\n";
            } else {
                json cex = {{"members", *report.counterexample}, {"point", vector_to_json(*report.meeting_point)}};
                out << "not transversal " << cex.dump() << "\n";
            }
        } else if (*partition) {
            auto points = points_from_json(read_json_file(input));
            if (points.empty()) throw PreconditionError("no input points");
            auto pr = partition_points(points, points.front().size(), degree, Rational::parse(tolerance), seed);
            write_json_file(output, pr);
            out << "j=" << pr.j() << " product_degree=" << pr.product_degree << " max_class=" << pr.max_class_count()
                << " bound=" << pr.class_bound << " zero_set=" << pr.zero_set_points.size() << "\n";
        } else if (*crossings) {
            auto pr = read_json_file(partition_file).get<PartitionResult>();
            auto line = read_json_file(line_file).get<AffineFlat>();
            try {
                out << line_cell_crossings(pr, line) << "\n";
            } catch (const LineInZeroSet& e) {
                err << "line lies in the zero set: " << e.what() << "\n";
                return 1;
            }
        } else if (*demo) {
            auto families = family_files.empty() ? grid_lines(demo_n, demo_side) : load_families(family_files);
            auto rep = recursion_demo(families, degree, Rational::parse(tolerance), seed);
            json tallies = json::array();
            for (const auto& t : rep.tallies)
                tallies.push_back({{"lines", t.lines},
                                   {"lines_in_zero_set", t.lines_in_zero_set},
                                   {"incidences", t.incidences},
                                   {"max_per_line", t.max_per_line},
                                   {"bound", t.bound}});
            json cells = json::object();
            for (const auto& [sv, c] : rep.in_cells) cells[sv.signs] = c;
            json report = {{"total", rep.total},          {"in_cells", cells},
                           {"on_surface", rep.on_surface}, {"max_class", rep.max_class},
                           {"j", rep.j},                  {"product_degree", rep.product_degree},
                           {"class_bound", rep.class_bound}, {"conserved", rep.conserved},
                           {"vanishing_check", rep.vanishing_check}, {"tallies", tallies},
                           {"factors", rep.factors}};
            out << report.dump(2) << "\n";
        } else if (*experiment) {
            auto cfg = ExperimentConfig::from_json(read_json_file(config_file));
            if (seed_override) cfg.seeds = {*seed_override};
            if (!output.empty()) cfg.output = output;
            if (!format.empty()) cfg.format = format;
            cfg.validate();
            auto rows = run_experiment(cfg);
            EmitOptions opts;
            opts.include_timing = !no_timing;
            auto fmt = cfg.format == "json" ? ResultFormat::json : ResultFormat::csv;
            if (cfg.output) {
                emit_results(rows, fmt, *cfg.output, opts);
            } else if (fmt == ResultFormat::csv) {
                out << format_csv(rows, opts);
            } else {
                out << rows_to_json(rows, opts).dump(2) << "\n";
            }
            for (const auto& r : rows)
                if (!r.error.empty()) err << r.kind << " " << r.params << ": " << r.error << "\n";
        } else if (*fit) {
            auto rows = read_results(input);
            std::vector<ResultRow> selected;
            for (auto& r : rows)
                if (r.error.empty() && (kind_filter.empty() || r.kind == kind_filter)) selected.push_back(std::move(r));
            auto f = fit_exponent(selected, x_field, y_field);
            out << "slope=" << format_double(f.slope) << " intercept=" << format_double(f.intercept)
                << " residual=" << format_double(f.residual) << " points=" << f.points << "\n";
        }
    } catch (const std::exception& e) {
        int code = exit_code_for(e);
        err << (code == 2 ? "invariant violation: " : "error: ") << e.what() << "\n";
        return code;
    }
    return 0;
}

int exit_code_for(const std::exception& e) { return dynamic_cast<const InvariantViolation*>(&e) ? 2 : 1; }

}  // namespace jointlab

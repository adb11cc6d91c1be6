#include "jointlab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "jointlab/errors.hpp"
#include "jointlab/generators.hpp"
#include "jointlab/joints.hpp"
#include "jointlab/partition.hpp"
#include "jointlab/random.hpp"

namespace jointlab {

namespace {

constexpr std::string_view kind_names[] = {"grid_lines", "grid_flats", "bush", "random", "partition", "recursion_demo"};

std::string join(std::span<const std::size_t> values, char sep) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(values[i]);
    }
    return s;
}

std::string sanitize(std::string s) {
    for (auto& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
    return s;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view s) {
    std::string tmp(s);
    char* end = nullptr;
    double v = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size()) throw std::invalid_argument("not a number: " + tmp);
    return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

}  // namespace

std::string_view to_string(ExperimentKind kind) { return kind_names[static_cast<std::size_t>(kind)]; }

ExperimentKind parse_experiment_kind(std::string_view name) {
    for (std::size_t i = 0; i < std::size(kind_names); ++i)
        if (kind_names[i] == name) return static_cast<ExperimentKind>(i);
    throw PreconditionError("unknown experiment kind \"" + std::string(name) + "\"");
}

void ExperimentConfig::validate() const {
    if (ladder.empty()) throw PreconditionError("experiment: ladder is empty");
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (ladder[i] <= ladder[i - 1]) throw PreconditionError("experiment: ladder must be strictly increasing");
    if (seeds.empty()) throw PreconditionError("experiment: no seeds");
    if (format != "csv" && format != "json") throw PreconditionError("experiment: format must be csv or json");
    if (output) {
        auto dir = output->parent_path();
        if (!dir.empty() && !std::filesystem::is_directory(dir))
            throw PreconditionError("experiment: output directory " + dir.string() + " does not exist");
    }
    switch (kind) {
        case ExperimentKind::grid_flats:
        case ExperimentKind::random:
            if (alphas.size() < 2) throw PreconditionError("experiment: alphas needs at least two entries");
            break;
        case ExperimentKind::bush:
            if (!multiplicities.empty() && multiplicities.size() != n)
                throw PreconditionError("experiment: multiplicities needs n entries");
            break;
        default:
            break;
    }
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.kind = parse_experiment_kind(j.at("kind").get<std::string>());
    c.ladder = j.at("ladder").get<std::vector<std::size_t>>();
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.n = j.value("n", c.n);
    c.alphas = j.value("alphas", c.alphas);
    c.multiplicities = j.value("multiplicities", c.multiplicities);
    c.degree = j.value("degree", c.degree);
    if (j.contains("tolerance")) {
        const auto& t = j.at("tolerance");
        c.tolerance = t.is_string() ? Rational::parse(t.get<std::string>()) : Rational::from_double(t.get<double>());
    }
    c.coord_bound = j.value("coord_bound", c.coord_bound);
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    c.format = j.value("format", c.format);
    return c;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j = {{"kind", std::string(jointlab::to_string(kind))},
                        {"ladder", ladder},
                        {"seeds", seeds},
                        {"n", n},
                        {"alphas", alphas},
                        {"multiplicities", multiplicities},
                        {"degree", degree},
                        {"tolerance", tolerance.str()},
                        {"coord_bound", coord_bound},
                        {"format", format}};
    if (output) j["output"] = output->string();
    return j;
}

namespace {

std::vector<std::size_t> family_sizes(std::span<const FlatFamily> families) {
    std::vector<std::size_t> s;
    for (const auto& f : families) s.push_back(f.size());
    return s;
}

void fill_joint_row(ResultRow& row, std::span<const FlatFamily> families) {
    row.sizes = family_sizes(families);
    JointSet js = find_joints(families);
    row.joints = js.size();
    bool lines = families.size() == families.front().ambient_dim();
    for (const auto& f : families) lines = lines && f.flat_dim() == 1;
    if (lines) row.carbery_sum = carbery_sum(js, families.size()).value;
}

std::vector<QVector> random_unit_cube_points(std::size_t count, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<QVector> pts(count, QVector(n));
    for (auto& p : pts)
        for (auto& x : p) x = Rational(static_cast<long>(draw_int(rng, 0, 1000)), 1000);
    return pts;
}

void run_point(const ExperimentConfig& cfg, std::size_t value, std::uint64_t seed, ResultRow& row) {
    std::ostringstream params;
    switch (cfg.kind) {
        case ExperimentKind::grid_lines: {
            params << "n=" << cfg.n << ";S=" << value;
            row.params = params.str();
            fill_joint_row(row, grid_lines(cfg.n, value));
            break;
        }
        case ExperimentKind::grid_flats: {
            params << "k=" << cfg.alphas.size() << ";alphas=" << join(cfg.alphas, '-') << ";S=" << value;
            row.params = params.str();
            fill_joint_row(row, grid_flats(cfg.alphas.size(), cfg.alphas, value));
            break;
        }
        case ExperimentKind::bush: {
            std::vector<std::size_t> m(cfg.n, value);
            if (!cfg.multiplicities.empty())
                for (std::size_t i = 0; i < cfg.n; ++i) m[i] = cfg.multiplicities[i] * value;
            params << "n=" << cfg.n << ";m=" << join(m, '-');
            row.params = params.str();
            fill_joint_row(row, bush_config(cfg.n, m, seed));
            break;
        }
        case ExperimentKind::random: {
            std::size_t n = std::accumulate(cfg.alphas.begin(), cfg.alphas.end(), std::size_t{0});
            params << "n=" << n << ";alphas=" << join(cfg.alphas, '-') << ";count=" << value
                   << ";bound=" << cfg.coord_bound;
            row.params = params.str();
            std::vector<FlatFamily> families;
            for (std::size_t i = 0; i < cfg.alphas.size(); ++i)
                families.push_back(random_flats(n, cfg.alphas[i], value, cfg.coord_bound, mix_seed(seed, i)));
            fill_joint_row(row, families);
            break;
        }
        case ExperimentKind::partition: {
            params << "n=" << cfg.n << ";N=" << value << ";D=" << cfg.degree << ";tau=" << cfg.tolerance.str();
            row.params = params.str();
            auto pts = random_unit_cube_points(value, cfg.n, seed);
            auto pr = partition_points(pts, cfg.n, cfg.degree, cfg.tolerance, seed);
            params << ";j=" << pr.j() << ";product_degree=" << pr.product_degree << ";max_class=" << pr.max_class_count()
                   << ";bound=" << pr.class_bound << ";zero_set=" << pr.zero_set_points.size();
            row.params = params.str();
            row.sizes = {value};
            break;
        }
        case ExperimentKind::recursion_demo: {
            params << "n=" << cfg.n << ";S=" << value << ";D=" << cfg.degree << ";tau=" << cfg.tolerance.str();
            row.params = params.str();
            auto families = grid_lines(cfg.n, value);
            auto rep = recursion_demo(families, cfg.degree, cfg.tolerance, seed);
            std::size_t incidences = 0;
            for (const auto& t : rep.tallies) incidences += t.incidences;
            params << ";j=" << rep.j << ";on_surface=" << rep.on_surface << ";max_class=" << rep.max_class
                   << ";incidences=" << incidences;
            row.params = params.str();
            row.sizes = family_sizes(families);
            row.joints = rep.total;
            break;
        }
    }
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::vector<ResultRow> rows;
    for (auto value : config.ladder)
        for (auto seed : config.seeds) {
            ResultRow row;
            row.kind = std::string(to_string(config.kind));
            row.seed = seed;
            auto start = std::chrono::steady_clock::now();
            try {
                run_point(config, value, seed, row);
            } catch (const std::exception& e) {
                row.error = sanitize(e.what());
                row.joints = 0;
                row.carbery_sum.reset();
            }
            row.params = sanitize(row.params);
            row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            rows.push_back(std::move(row));
        }
    return rows;
}

double row_field(const ResultRow& row, std::string_view field) {
    if (field == "joints") return static_cast<double>(row.joints);
    if (field == "carbery_sum") {
        if (!row.carbery_sum) throw PreconditionError("row has no carbery_sum");
        return *row.carbery_sum;
    }
    if (field == "total_size")
        return static_cast<double>(std::accumulate(row.sizes.begin(), row.sizes.end(), std::size_t{0}));
    if (field == "size_product") {
        double p = 1.0;
        for (auto s : row.sizes) p *= static_cast<double>(s);
        return p;
    }
    if (field == "wall_ms") return row.wall_ms;
    if (field == "seed") return static_cast<double>(row.seed);
    if (field.starts_with("param:")) {
        std::string key(field.substr(6));
        for (const auto& kv : split(row.params, ';')) {
            auto eq = kv.find('=');
            if (eq != std::string::npos && kv.substr(0, eq) == key) return parse_double(kv.substr(eq + 1));
        }
        throw PreconditionError("row params have no key \"" + key + "\"");
    }
    throw PreconditionError("unknown row field \"" + std::string(field) + "\"");
}

ExponentFit fit_exponent(std::span<const ResultRow> rows, std::string_view x_field, std::string_view y_field) {
    if (rows.size() < 3) throw PreconditionError("fit_exponent: need at least three rows");
    std::vector<double> lx, ly;
    for (const auto& r : rows) {
        double x = row_field(r, x_field), y = row_field(r, y_field);
        if (!(x > 0) || !(y > 0)) throw PreconditionError("fit_exponent: nonpositive value in a fitted field");
        lx.push_back(std::log(x));
        ly.push_back(std::log(y));
    }
    const double m = static_cast<double>(lx.size());
    double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / m;
    double my = std::accumulate(ly.begin(), ly.end(), 0.0) / m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0) throw PreconditionError("fit_exponent: all x values are equal");
    ExponentFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / m);
    fit.points = lx.size();
    return fit;
}

namespace {

constexpr std::string_view csv_header = "kind,params,sizes,joints,carbery_sum,seed,wall_ms";
constexpr std::string_view error_tag = ";error=";

}  // namespace

std::string format_csv(std::span<const ResultRow> rows, const EmitOptions& options) {
    std::string out(csv_header);
    out += '\n';
    for (const auto& r : rows) {
        out += r.kind;
        out += ',';
        out += r.params;
        if (!r.error.empty()) {
            out += error_tag;
            out += r.error;
        }
        out += ',';
        out += join(r.sizes, ';');
        out += ',';
        out += std::to_string(r.joints);
        out += ',';
        if (r.carbery_sum) out += format_double(*r.carbery_sum);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        if (options.include_timing) out += format_double(r.wall_ms);
        out += '\n';
    }
    return out;
}

std::vector<ResultRow> parse_csv(std::string_view text) {
    std::vector<ResultRow> rows;
    auto lines = split(text, '\n');
    if (lines.empty() || lines.front() != csv_header) throw std::invalid_argument("results CSV: unexpected header");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = split(lines[i], ',');
        if (f.size() != 7) throw std::invalid_argument("results CSV: line " + std::to_string(i + 1) + " has " +
                                                       std::to_string(f.size()) + " fields");
        ResultRow r;
        r.kind = f[0];
        auto tag = f[1].find(error_tag);
        if (tag != std::string::npos) {
            r.error = f[1].substr(tag + error_tag.size());
            f[1].resize(tag);
        }
        r.params = f[1];
        if (!f[2].empty())
            for (const auto& s : split(f[2], ';')) r.sizes.push_back(std::stoull(s));
        r.joints = std::stoull(f[3]);
        if (!f[4].empty()) r.carbery_sum = parse_double(f[4]);
        r.seed = std::stoull(f[5]);
        if (!f[6].empty()) r.wall_ms = parse_double(f[6]);
        rows.push_back(std::move(r));
    }
    return rows;
}

nlohmann::json rows_to_json(std::span<const ResultRow> rows, const EmitOptions& options) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json o = {{"kind", r.kind},     {"params", r.params},           {"sizes", r.sizes},
                            {"joints", r.joints}, {"carbery_sum", nullptr},       {"seed", r.seed},
                            {"wall_ms", options.include_timing ? nlohmann::json(r.wall_ms) : nlohmann::json(nullptr)},
                            {"error", r.error}};
        if (r.carbery_sum) o["carbery_sum"] = *r.carbery_sum;
        j.push_back(std::move(o));
    }
    return j;
}

std::vector<ResultRow> rows_from_json(const nlohmann::json& j) {
    std::vector<ResultRow> rows;
    for (const auto& o : j) {
        ResultRow r;
        r.kind = o.at("kind").get<std::string>();
        r.params = o.at("params").get<std::string>();
        r.sizes = o.at("sizes").get<std::vector<std::size_t>>();
        r.joints = o.at("joints").get<std::size_t>();
        if (!o.at("carbery_sum").is_null()) r.carbery_sum = o.at("carbery_sum").get<double>();
        r.seed = o.at("seed").get<std::uint64_t>();
        if (!o.at("wall_ms").is_null()) r.wall_ms = o.at("wall_ms").get<double>();
        r.error = o.value("error", std::string{});
        rows.push_back(std::move(r));
    }
    return rows;
}

void emit_results(std::span<const ResultRow> rows, ResultFormat format, const std::filesystem::path& path,
                  const EmitOptions& options) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    if (format == ResultFormat::csv) out << format_csv(rows, options);
    else out << rows_to_json(rows, options).dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<ResultRow> read_results(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    if (path.extension() == ".json") return rows_from_json(nlohmann::json::parse(buf.str()));
    return parse_csv(buf.str());
}

}  // namespace jointlab

#include "jointlab/io.hpp"

#include <fstream>
#include <stdexcept>

#include "jointlab/errors.hpp"

namespace jointlab {

void to_json(json& j, const Rational& r) { j = r.str(); }

void from_json(const json& j, Rational& r) {
    if (j.is_number_integer()) {
        r = Rational(j.get<long>());
        return;
    }
    r = Rational::parse(j.get<std::string>());
}

json vector_to_json(const QVector& v) {
    json j = json::array();
    for (const auto& x : v) j.push_back(x.str());
    return j;
}

QVector vector_from_json(const json& j) {
    QVector v;
    for (const auto& x : j) v.push_back(x.get<Rational>());
    return v;
}

void to_json(json& j, const MultiPoly& p) {
    j = json::array();
    for (const auto& [e, c] : p.terms()) j.push_back({{"exponents", e}, {"coeff", c.str()}});
}

MultiPoly multipoly_from_json(const json& j, std::size_t n_vars) {
    MultiPoly p(n_vars);
    for (const auto& t : j) {
        auto e = t.at("exponents").get<Exponents>();
        if (e.size() != n_vars) throw std::invalid_argument("MultiPoly JSON: exponent vector has wrong length");
        auto c = t.at("coeff").get<Rational>();
        if (c.is_zero()) throw std::invalid_argument("MultiPoly JSON: zero coefficient");
        p.add_term(e, c);
    }
    return p;
}

void from_json(const json& j, MultiPoly& p) {
    std::size_t n = j.empty() ? 0 : j.front().at("exponents").size();
    p = multipoly_from_json(j, n);
}

void to_json(json& j, const AffineFlat& f) {
    json dirs = json::array();
    for (const auto& d : f.direction_vectors()) dirs.push_back(vector_to_json(d));
    j = {{"ambient_dim", f.ambient_dim()}, {"base", vector_to_json(f.base())}, {"directions", dirs}};
}

void from_json(const json& j, AffineFlat& f) {
    QVector base = vector_from_json(j.at("base"));
    if (j.contains("ambient_dim") && j.at("ambient_dim").get<std::size_t>() != base.size())
        throw std::invalid_argument("flat JSON: ambient_dim disagrees with base point");
    std::vector<QVector> dirs;
    for (const auto& d : j.at("directions")) dirs.push_back(vector_from_json(d));
    f = AffineFlat(std::move(base), dirs);
}

void to_json(json& j, const FlatFamily& f) {
    j = {{"ambient_dim", f.ambient_dim()}, {"flat_dim", f.flat_dim()}, {"members", f.members()}};
}

void from_json(const json& j, FlatFamily& f) {
    f = FlatFamily(j.at("ambient_dim").get<std::size_t>(), j.at("flat_dim").get<std::size_t>(),
                   j.at("members").get<std::vector<AffineFlat>>());
}

void to_json(json& j, const JointSet& js) {
    j = json::array();
    for (const auto& [x, rec] : js) {
        json witness = json::array();
        for (std::size_t i = 0; i < rec.witness.size(); ++i) witness.push_back({i, rec.witness[i]});
        j.push_back({{"location", vector_to_json(x)}, {"multiplicities", rec.multiplicities}, {"witness", witness}});
    }
}

void from_json(const json& j, JointSet& js) {
    js.records.clear();
    for (const auto& r : j) {
        JointRecord rec;
        rec.location = vector_from_json(r.at("location"));
        rec.multiplicities = r.at("multiplicities").get<std::vector<std::size_t>>();
        const auto& w = r.at("witness");
        rec.witness.assign(w.size(), 0);
        for (const auto& pair : w) {
            auto family = pair.at(0).get<std::size_t>();
            if (family >= rec.witness.size()) throw std::invalid_argument("joint JSON: witness family index out of range");
            rec.witness[family] = pair.at(1).get<std::size_t>();
        }
        auto loc = rec.location;
        if (!js.records.emplace(std::move(loc), std::move(rec)).second)
            throw std::invalid_argument("joint JSON: duplicate location");
    }
}

void to_json(json& j, const PartitionResult& pr) {
    json counts = json::object();
    for (const auto& [sv, c] : pr.class_counts) counts[sv.signs] = c;
    json assignment = json::array();
    for (const auto& a : pr.assignment) assignment.push_back(a ? json(a->signs) : json(nullptr));
    j = {{"n", pr.n},
         {"degree_budget", pr.degree_budget},
         {"tolerance", pr.tolerance.str()},
         {"j", pr.j()},
         {"product_degree", pr.product_degree},
         {"class_bound", pr.class_bound},
         {"factors", pr.factors},
         {"class_counts", counts},
         {"zero_set_indices", pr.zero_set_points},
         {"assignment", assignment}};
}

void from_json(const json& j, PartitionResult& pr) {
    pr = PartitionResult{};
    pr.n = j.at("n").get<std::size_t>();
    pr.degree_budget = j.value("degree_budget", std::size_t{0});
    if (j.contains("tolerance")) pr.tolerance = j.at("tolerance").get<Rational>();
    for (const auto& f : j.at("factors")) pr.factors.push_back(multipoly_from_json(f, pr.n));
    pr.product_degree = 0;
    for (const auto& f : pr.factors) pr.product_degree += static_cast<std::size_t>(std::max(f.degree(), 0));
    if (j.contains("product_degree") && j.at("product_degree").get<std::size_t>() != pr.product_degree)
        throw std::invalid_argument("partition JSON: product_degree disagrees with factors");
    if (j.contains("class_counts"))
        for (const auto& [k, v] : j.at("class_counts").items()) pr.class_counts[SignVector{k}] = v.get<std::size_t>();
    pr.zero_set_points = j.value("zero_set_indices", std::vector<std::size_t>{});
    if (j.contains("assignment"))
        for (const auto& a : j.at("assignment"))
            pr.assignment.push_back(a.is_null() ? std::nullopt : std::optional<SignVector>(SignVector{a.get<std::string>()}));
    pr.class_bound = j.value("class_bound", std::size_t{0});
}

json points_to_json(const std::vector<QVector>& points) {
    json j = json::array();
    for (const auto& p : points) j.push_back(vector_to_json(p));
    return j;
}

std::vector<QVector> points_from_json(const json& j) {
    std::vector<QVector> pts;
    for (const auto& p : j) pts.push_back(vector_from_json(p));
    return pts;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return json::parse(in);
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace jointlab

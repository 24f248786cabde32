#include "shellfield/io.hpp"

#include <set>

namespace shellfield::io {

namespace {

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.dim(); ++i) a.push_back(v[i]);
    return a;
}

Vec vec_from_json(const json& j, const std::string& context) {
    if (!j.is_array() || j.empty() || j.size() > static_cast<size_t>(kMaxDim))
        throw std::invalid_argument(context + ": expected an array of 2..4 numbers");
    Vec v(static_cast<int>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<Real>();
    return v;
}

json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

Complex complex_from_json(const json& j, const std::string& context) {
    if (j.is_number()) return {j.get<Real>(), 0.0};
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument(context + ": expected [re, im] or a number");
    return {j[0].get<Real>(), j[1].get<Real>()};
}

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(m.at(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const json& j, int dim, const std::string& context) {
    if (!j.is_array() || j.size() != static_cast<size_t>(dim))
        throw std::invalid_argument(context + ": expected a square matrix");
    Mat m(dim);
    for (int i = 0; i < dim; ++i) {
        const json& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || row.size() != static_cast<size_t>(dim))
            throw std::invalid_argument(context + ": expected a square matrix");
        for (int k = 0; k < dim; ++k) m.at(i, k) = row[static_cast<size_t>(k)].get<Real>();
    }
    return m;
}

TestFunction packet_from_json(const json& j) {
    check_keys(j, "packet test function", {"type", "dimension", "terms"},
               {"frequency_mask"});
    const int dim = j.at("dimension").get<int>();
    FreqMask mask = FreqMask::none;
    if (j.contains("frequency_mask")) mask = freq_mask_from_string(j.at("frequency_mask"));
    std::vector<GaussianTerm> terms;
    for (const json& tj : j.at("terms")) {
        check_keys(tj, "packet term", {"center", "carrier"},
                   {"amplitude", "widths", "precision"});
        if (tj.contains("widths") == tj.contains("precision"))
            throw std::invalid_argument("packet term: give exactly one of widths / precision");
        GaussianTerm t;
        t.amplitude = tj.contains("amplitude")
                          ? complex_from_json(tj.at("amplitude"), "packet amplitude")
                          : Complex{1.0, 0.0};
        t.center = vec_from_json(tj.at("center"), "packet center");
        t.carrier = vec_from_json(tj.at("carrier"), "packet carrier");
        if (tj.contains("widths")) {
            const Vec w = vec_from_json(tj.at("widths"), "packet widths");
            Vec prec(w.dim());
            for (int a = 0; a < w.dim(); ++a) {
                if (!(w[a] > 0.0))
                    throw std::invalid_argument("packet widths: must be strictly positive");
                prec[a] = 1.0 / (w[a] * w[a]);
            }
            t.precision = Mat::diagonal(prec);
        } else {
            t.precision = mat_from_json(tj.at("precision"), dim, "packet precision");
        }
        terms.push_back(std::move(t));
    }
    return TestFunction::gaussian_packet_terms(dim, std::move(terms), mask);
}

TestFunction grid_from_json(const json& j) {
    check_keys(j, "grid test function",
               {"type", "dimension", "box", "shape", "values_re", "values_im"},
               {"frequency_mask", "approximate", "ellipsoid"});
    const int dim = j.at("dimension").get<int>();
    const json& box = j.at("box");
    check_keys(box, "grid box", {"min", "max"}, {});
    const Vec lo = vec_from_json(box.at("min"), "grid box min");
    const Vec hi = vec_from_json(box.at("max"), "grid box max");
    std::array<int, kMaxDim> shape{};
    shape.fill(1);
    const json& js = j.at("shape");
    if (!js.is_array() || js.size() != static_cast<size_t>(dim))
        throw std::invalid_argument("grid shape: expected one entry per axis");
    for (int a = 0; a < dim; ++a) shape[static_cast<size_t>(a)] = js[static_cast<size_t>(a)].get<int>();
    const auto& re = j.at("values_re");
    const auto& im = j.at("values_im");
    if (!re.is_array() || !im.is_array() || re.size() != im.size())
        throw std::invalid_argument("grid values: values_re/values_im must be equal-length arrays");
    std::vector<Complex> samples(re.size());
    for (size_t i = 0; i < re.size(); ++i)
        samples[i] = {re[i].get<Real>(), im[i].get<Real>()};
    TestFunction f = TestFunction::grid_bump(dim, lo, hi, shape, std::move(samples));
    if (j.contains("frequency_mask") &&
        freq_mask_from_string(j.at("frequency_mask")) != FreqMask::none)
        throw std::invalid_argument(
            "grid test function: serialize masked grids by projecting after load");
    return f;
}

TestFunction mollifier_from_json(const json& j) {
    check_keys(j, "mollifier test function", {"type", "center", "radius"},
               {"amplitude", "samples_per_axis"});
    const Vec center = vec_from_json(j.at("center"), "mollifier center");
    const Vec radius = vec_from_json(j.at("radius"), "mollifier radius");
    const Complex amp = j.contains("amplitude")
                            ? complex_from_json(j.at("amplitude"), "mollifier amplitude")
                            : Complex{1.0, 0.0};
    const int n = j.contains("samples_per_axis") ? j.at("samples_per_axis").get<int>() : 81;
    return TestFunction::mollifier(center, radius, amp, n);
}

}  // namespace

void check_keys(const json& j, const std::string& context,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional) {
    if (!j.is_object()) throw std::invalid_argument(context + ": expected a JSON object");
    std::set<std::string> allowed;
    for (const char* k : required) {
        if (!j.contains(k))
            throw std::invalid_argument(context + ": missing required key '" + k + "'");
        allowed.insert(k);
    }
    for (const char* k : optional) allowed.insert(k);
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key))
            throw std::invalid_argument(context + ": unknown key '" + key + "'");
}

std::string to_string(FreqMask m) {
    switch (m) {
        case FreqMask::none: return "none";
        case FreqMask::positive: return "positive";
        case FreqMask::negative: return "negative";
    }
    return "none";
}

FreqMask freq_mask_from_string(const std::string& s) {
    if (s == "none") return FreqMask::none;
    if (s == "positive") return FreqMask::positive;
    if (s == "negative") return FreqMask::negative;
    throw std::invalid_argument("frequency_mask: expected none/positive/negative, got '" + s + "'");
}

std::string to_string(QuadratureRule r) {
    return r == QuadratureRule::GaussLegendre ? "gauss-legendre" : "trapezoid";
}

QuadratureRule rule_from_string(const std::string& s) {
    if (s == "gauss-legendre") return QuadratureRule::GaussLegendre;
    if (s == "trapezoid") return QuadratureRule::Trapezoid;
    throw std::invalid_argument("quadrature rule: expected gauss-legendre/trapezoid, got '" + s +
                                "'");
}

KernelKind kernel_from_string(const std::string& s) {
    if (s == "quantum") return KernelKind::Quantum;
    if (s == "classical") return KernelKind::Classical;
    if (s == "em-quantum") return KernelKind::EMQuantum;
    throw std::invalid_argument("kernel: expected quantum/classical/em-quantum, got '" + s + "'");
}

json to_json(const TestFunction& f) {
    const detail::Payload& p = f.payload();
    json j;
    j["dimension"] = p.dim;
    j["frequency_mask"] = to_string(p.mask);
    if (const auto* g = std::get_if<detail::GridData>(&p.data)) {
        j["type"] = "grid";
        j["box"] = {{"min", vec_to_json(g->lo)}, {"max", vec_to_json(g->hi)}};
        json shape = json::array();
        for (int a = 0; a < p.dim; ++a) shape.push_back(g->shape[static_cast<size_t>(a)]);
        j["shape"] = std::move(shape);
        json re = json::array(), im = json::array();
        for (const Complex& s : g->samples) {
            re.push_back(s.real());
            im.push_back(s.imag());
        }
        j["values_re"] = std::move(re);
        j["values_im"] = std::move(im);
        if (g->approximate) j["approximate"] = true;
        if (g->has_ellipsoid)
            j["ellipsoid"] = {{"center", vec_to_json(g->ell_center)},
                              {"radius", vec_to_json(g->ell_radius)}};
    } else {
        const auto& terms = std::get<detail::PacketData>(p.data).terms;
        j["type"] = "packet";
        json tl = json::array();
        for (const GaussianTerm& t : terms) {
            json tj;
            tj["amplitude"] = complex_to_json(t.amplitude);
            tj["center"] = vec_to_json(t.center);
            tj["carrier"] = vec_to_json(t.carrier);
            tj["precision"] = mat_to_json(t.precision);
            tl.push_back(std::move(tj));
        }
        j["terms"] = std::move(tl);
    }
    return j;
}

TestFunction testfn_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw std::invalid_argument("test function: expected an object with a 'type' key");
    const std::string type = j.at("type").get<std::string>();
    if (type == "packet") return packet_from_json(j);
    if (type == "grid") {
        TestFunction f = grid_from_json(j);
        return f;
    }
    if (type == "mollifier") return mollifier_from_json(j);
    throw std::invalid_argument("test function: unknown type '" + type + "'");
}

json to_json(const ShellConfig& cfg) {
    return json{{"mass", cfg.mass},
                {"hbar", cfg.hbar},
                {"dimension", cfg.dimension},
                {"quadrature",
                 {{"cutoff", cfg.quadrature.cutoff},
                  {"nodes", cfg.quadrature.nodes},
                  {"rule", to_string(cfg.quadrature.rule)}}}};
}

ShellConfig shell_config_from_json(const json& j) {
    check_keys(j, "shell config", {"mass", "dimension"}, {"hbar", "quadrature"});
    ShellConfig cfg;
    cfg.mass = j.at("mass").get<Real>();
    cfg.dimension = j.at("dimension").get<int>();
    if (j.contains("hbar")) cfg.hbar = j.at("hbar").get<Real>();
    if (j.contains("quadrature")) {
        const json& q = j.at("quadrature");
        check_keys(q, "quadrature", {"cutoff", "nodes"}, {"rule"});
        cfg.quadrature.cutoff = q.at("cutoff").get<Real>();
        cfg.quadrature.nodes = q.at("nodes").get<int>();
        if (q.contains("rule")) cfg.quadrature.rule = rule_from_string(q.at("rule"));
    }
    cfg.validate();
    return cfg;
}

json to_json(const GramMatrix& gm) {
    json j;
    j["kernel"] = shellfield::to_string(gm.kernel());
    j["config"] = to_json(gm.config());
    j["ids"] = gm.ids();
    json re = json::array(), im = json::array();
    for (const Complex& c : gm.matrix()) {
        re.push_back(c.real());
        im.push_back(c.imag());
    }
    j["matrix_re"] = std::move(re);
    j["matrix_im"] = std::move(im);
    j["trace"] = gm.trace();
    j["min_eigenvalue"] = gm.min_eigenvalue();
    return j;
}

json to_json(const SampleBatch& batch) {
    json j;
    j["n"] = batch.n;
    j["seed"] = batch.seed;
    j["mode_ids"] = batch.mode_ids;
    j["kernel"] = shellfield::to_string(batch.kernel);
    j["rng"] = batch.rng;
    json re = json::array(), im = json::array();
    for (const Complex& c : batch.draws) {
        re.push_back(c.real());
        im.push_back(c.imag());
    }
    j["draws_re"] = std::move(re);
    j["draws_im"] = std::move(im);
    return j;
}

std::string to_csv(const CompareReport& report) {
    std::string out = "mode_id,order,predicted,empirical,stderr,z\n";
    char line[256];
    for (const CompareMomentRow& r : report.moments) {
        std::snprintf(line, sizeof line, "%s,%d,%.17g,%.17g,%.17g,%.17g\n", r.mode_id.c_str(),
                      r.order, r.predicted, r.empirical, r.stderr_, r.z);
        out += line;
    }
    return out;
}

json to_json(const CompareReport& report) {
    json j;
    j["n"] = report.n;
    j["seed"] = report.seed;
    j["rng"] = report.rng;
    json rows = json::array();
    for (const CompareMomentRow& r : report.moments)
        rows.push_back({{"mode_id", r.mode_id},
                        {"order", r.order},
                        {"predicted", r.predicted},
                        {"empirical", r.empirical},
                        {"stderr", r.stderr_},
                        {"z", r.z}});
    j["moments"] = std::move(rows);
    json f2 = json::array();
    for (const Factor2Row& r : report.factor2)
        f2.push_back({{"mode_id", r.mode_id},
                      {"quantum", complex_to_json(r.quantum)},
                      {"classical", complex_to_json(r.classical)},
                      {"ratio", r.ratio},
                      {"residual", r.residual}});
    j["factor2"] = std::move(f2);
    j["skipped_modes"] = report.skipped_modes;
    return j;
}

}  // namespace shellfield::io

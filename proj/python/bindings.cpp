#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shellfield/fock.hpp"
#include "shellfield/io.hpp"
#include "shellfield/rf.hpp"
#include "shellfield/rng.hpp"
#include "shellfield/shell.hpp"

namespace py = pybind11;
namespace sf = shellfield;

namespace {

sf::Vec to_vec(const std::vector<double>& v) {
    sf::Vec out(static_cast<int>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) out[static_cast<int>(i)] = v[i];
    return out;
}

std::vector<double> from_vec(const sf::Vec& v) {
    std::vector<double> out(static_cast<size_t>(v.dim()));
    for (int i = 0; i < v.dim(); ++i) out[static_cast<size_t>(i)] = v[i];
    return out;
}

sf::TestFunction packet_from_dicts(int dim, const std::vector<py::dict>& terms) {
    std::vector<sf::TestFunction::PacketTermSpec> specs;
    specs.reserve(terms.size());
    for (const py::dict& t : terms) {
        sf::TestFunction::PacketTermSpec s;
        s.amplitude = t.contains("amplitude") ? t["amplitude"].cast<sf::Complex>()
                                              : sf::Complex{1.0, 0.0};
        s.center = to_vec(t["center"].cast<std::vector<double>>());
        s.widths = to_vec(t["widths"].cast<std::vector<double>>());
        s.carrier = t.contains("carrier") ? to_vec(t["carrier"].cast<std::vector<double>>())
                                          : sf::Vec(dim, 0.0);
        specs.push_back(std::move(s));
    }
    return sf::TestFunction::gaussian_packet(dim, specs);
}

py::array_t<std::complex<double>> draws_array(const sf::SampleBatch& b) {
    const auto m = static_cast<py::ssize_t>(b.mode_ids.size());
    py::array_t<std::complex<double>> arr({static_cast<py::ssize_t>(b.n), m});
    auto view = arr.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < static_cast<py::ssize_t>(b.n); ++i)
        for (py::ssize_t j = 0; j < m; ++j)
            view(i, j) = b.at(static_cast<std::int64_t>(i), static_cast<int>(j));
    return arr;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "mass-shell pairings, smeared-field algebra, and random-field sampling";

    py::enum_<sf::KernelKind>(m, "KernelKind")
        .value("quantum", sf::KernelKind::Quantum)
        .value("classical", sf::KernelKind::Classical)
        .value("em_quantum", sf::KernelKind::EMQuantum);

    py::enum_<sf::QuadratureRule>(m, "QuadratureRule")
        .value("gauss_legendre", sf::QuadratureRule::GaussLegendre)
        .value("trapezoid", sf::QuadratureRule::Trapezoid);

    py::class_<sf::ShellConfig>(m, "ShellConfig")
        .def(py::init([](double mass, double hbar, int dimension, double cutoff, int nodes,
                         sf::QuadratureRule rule) {
                 sf::ShellConfig cfg;
                 cfg.mass = mass;
                 cfg.hbar = hbar;
                 cfg.dimension = dimension;
                 cfg.quadrature.cutoff = cutoff;
                 cfg.quadrature.nodes = nodes;
                 cfg.quadrature.rule = rule;
                 cfg.validate();
                 return cfg;
             }),
             py::arg("mass"), py::arg("hbar") = 1.0, py::arg("dimension") = 2,
             py::arg("cutoff") = 16.0, py::arg("nodes") = 256,
             py::arg("rule") = sf::QuadratureRule::GaussLegendre)
        .def_readonly("mass", &sf::ShellConfig::mass)
        .def_readonly("hbar", &sf::ShellConfig::hbar)
        .def_readonly("dimension", &sf::ShellConfig::dimension)
        .def("__repr__", [](const sf::ShellConfig& c) {
            return "ShellConfig(mass=" + std::to_string(c.mass) +
                   ", dimension=" + std::to_string(c.dimension) + ")";
        });

    py::class_<sf::TestFunction>(m, "TestFunction")
        .def_static("gaussian_packet", &packet_from_dicts, py::arg("dim"), py::arg("terms"),
                    "Packet sum from dicts with center/widths and optional amplitude/carrier")
        .def_static(
            "mollifier",
            [](const std::vector<double>& center, const std::vector<double>& radius,
               sf::Complex amplitude, int samples_per_axis) {
                return sf::TestFunction::mollifier(to_vec(center), to_vec(radius), amplitude,
                                                   samples_per_axis);
            },
            py::arg("center"), py::arg("radius"), py::arg("amplitude") = sf::Complex{1.0, 0.0},
            py::arg("samples_per_axis") = 81)
        .def_property_readonly("dim", &sf::TestFunction::dim)
        .def_property_readonly("is_grid", &sf::TestFunction::is_grid)
        .def_property_readonly("positive_frequency", &sf::TestFunction::positive_frequency)
        .def("is_real", &sf::TestFunction::is_real, py::arg("tol") = 1e-12)
        .def("evaluate",
             [](const sf::TestFunction& f, const std::vector<double>& x) {
                 return sf::evaluate(f, sf::SpacetimePoint{to_vec(x)});
             })
        .def("spectrum",
             [](const sf::TestFunction& f, const std::vector<double>& k) {
                 return sf::spectrum(f, sf::WaveVector{to_vec(k)});
             })
        .def("conjugate", [](const sf::TestFunction& f) { return sf::conjugate(f); })
        .def("translate",
             [](const sf::TestFunction& f, const std::vector<double>& a) {
                 return sf::translate(f, sf::SpacetimePoint{to_vec(a)});
             })
        .def("boost",
             [](const sf::TestFunction& f, double rapidity, int axis) {
                 return sf::boost(f, rapidity, axis);
             },
             py::arg("rapidity"), py::arg("axis") = 1)
        .def("parity_reverse", [](const sf::TestFunction& f) { return sf::parity_reverse(f); })
        .def("time_reverse", [](const sf::TestFunction& f) { return sf::time_reverse(f); })
        .def("positive_frequency_projection",
             [](const sf::TestFunction& f) { return sf::positive_frequency_projection(f); })
        .def("__add__", [](const sf::TestFunction& f, const sf::TestFunction& g) {
            return sf::add(f, g);
        })
        .def("__rmul__", [](const sf::TestFunction& f, sf::Complex s) { return sf::scale(s, f); })
        .def("to_json", [](const sf::TestFunction& f) { return sf::io::to_json(f).dump(); })
        .def_static("from_json", [](const std::string& text) {
            return sf::io::testfn_from_json(nlohmann::json::parse(text));
        });

    m.def("quantum_ip", &sf::quantum_ip, py::arg("f"), py::arg("g"), py::arg("cfg"));
    m.def("classical_ip", &sf::classical_ip, py::arg("f"), py::arg("g"), py::arg("cfg"));
    m.def("pairing", &sf::pairing, py::arg("f"), py::arg("g"), py::arg("kind"), py::arg("cfg"));
    m.def("commutator_kernel", &sf::commutator_kernel, py::arg("f"), py::arg("g"),
          py::arg("kind"), py::arg("cfg"));
    m.def("field_commutator", &sf::field_commutator, py::arg("f"), py::arg("g"), py::arg("kind"),
          py::arg("cfg"));
    m.def("field_moment", &sf::field_moment, py::arg("f"), py::arg("n"), py::arg("kind"),
          py::arg("cfg"));
    m.def("ccr_commutator", &sf::ccr_commutator, py::arg("f"), py::arg("g"), py::arg("kind"),
          py::arg("cfg"));

    py::class_<sf::FockState>(m, "FockState")
        .def_static("vacuum", &sf::FockState::vacuum)
        .def_static("one_particle", &sf::FockState::one_particle, py::arg("g"),
                    py::arg("name") = "");

    m.def("resonance_probability", &sf::resonance_probability, py::arg("f"), py::arg("state"),
          py::arg("kind"), py::arg("cfg"));
    m.def("resonance_nonlocality_witness", &sf::resonance_nonlocality_witness, py::arg("f"),
          py::arg("g"), py::arg("cfg"));

    py::class_<sf::GramMatrix>(m, "GramMatrix")
        .def_property_readonly("ids", &sf::GramMatrix::ids)
        .def_property_readonly("kernel", &sf::GramMatrix::kernel)
        .def("at", &sf::GramMatrix::at)
        .def("trace", &sf::GramMatrix::trace)
        .def("min_eigenvalue", &sf::GramMatrix::min_eigenvalue);

    py::class_<sf::SampleBatch>(m, "SampleBatch")
        .def_readonly("n", &sf::SampleBatch::n)
        .def_readonly("seed", &sf::SampleBatch::seed)
        .def_readonly("mode_ids", &sf::SampleBatch::mode_ids)
        .def_readonly("rng", &sf::SampleBatch::rng)
        .def_property_readonly("draws", &draws_array);

    m.def(
        "gram",
        [](const std::vector<std::pair<std::string, sf::TestFunction>>& modes,
           sf::KernelKind kind, const sf::ShellConfig& cfg) {
            sf::ModeSet ms;
            for (const auto& [id, fn] : modes) ms.modes.push_back({id, fn});
            return sf::gram(ms, kind, cfg);
        },
        py::arg("modes"), py::arg("kind"), py::arg("cfg"));
    m.def(
        "sample",
        [](const sf::GramMatrix& gm, std::int64_t n, std::uint64_t seed, int threads) {
            return sf::sample(gm, n, seed, threads);
        },
        py::arg("gm"), py::arg("n"), py::arg("seed"), py::arg("threads") = 1);
    m.def(
        "empirical_moments",
        [](const sf::SampleBatch& batch, int mode_index, const std::vector<int>& orders) {
            py::list out;
            for (const sf::MomentEstimate& e : sf::empirical_moments(batch, mode_index, orders)) {
                py::dict d;
                d["order"] = e.order;
                d["value"] = e.value;
                d["stderr"] = e.stderr_jackknife;
                d["large_error_warning"] = e.large_error_warning;
                out.append(std::move(d));
            }
            return out;
        },
        py::arg("batch"), py::arg("mode_index"), py::arg("orders"));
    m.def(
        "compare_to_fock",
        [](const std::vector<std::pair<std::string, sf::TestFunction>>& modes,
           const std::vector<int>& orders, std::int64_t n, std::uint64_t seed,
           const sf::ShellConfig& cfg) {
            sf::ModeSet ms;
            for (const auto& [id, fn] : modes) ms.modes.push_back({id, fn});
            return sf::io::to_json(sf::compare_to_fock(ms, orders, n, seed, cfg)).dump();
        },
        py::arg("modes"), py::arg("orders"), py::arg("n"), py::arg("seed"), py::arg("cfg"));

    m.attr("__version__") = "0.1.0";
    m.attr("RNG_ALGORITHM") = sf::kRngAlgorithm;
}

// Copyright 2026 The qembed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "qembed/cli.hpp"
#include "qembed/config.hpp"
#include "qembed/generators.hpp"
#include "qembed/integrators.hpp"
#include "qembed/rng.hpp"
#include "qembed/verify.hpp"

namespace py = pybind11;
using namespace qembed;

namespace {

Measurement measurement_of(const std::string& name) {
    if (name == "none")
        return Measurement::none;
    if (name == "amplitude")
        return Measurement::amplitude;
    if (name == "phase")
        return Measurement::phase;
    throw py::value_error("measurement must be none, amplitude or phase");
}

Representation representation_of(const std::string& name) {
    if (name == "blocks")
        return Representation::blocks;
    if (name == "joint")
        return Representation::joint;
    throw py::value_error("representation must be blocks or joint");
}

BlockFault fault_of(const std::string& name) {
    if (name == "none")
        return BlockFault::none;
    if (name == "principal_hamiltonian")
        return BlockFault::flip_principal_hamiltonian;
    if (name == "aux_hamiltonian")
        return BlockFault::flip_aux_hamiltonian;
    if (name == "dissipator")
        return BlockFault::flip_dissipator;
    if (name == "measurement")
        return BlockFault::flip_measurement;
    throw py::value_error("unknown fault name");
}

SimConfig sim_config(double dt, double t_end, const std::string& measurement, std::uint64_t seed,
                     std::size_t stride, Scheme scheme) {
    SimConfig c;
    c.dt = dt;
    c.t_end = t_end;
    c.measurement = measurement_of(measurement);
    c.seed = seed;
    c.snapshot_stride = stride;
    c.scheme = scheme;
    c.validate();
    return c;
}

EmbeddingModel make_model(std::size_t principal, std::vector<std::size_t> aux, const CMatrix& H_s,
                          std::optional<CMatrix> probe, const py::list& baths) {
    EmbeddingModel m;
    m.dims = SubsystemDims(principal, aux);
    m.H_s = TimedOperator(H_s, principal_slot());
    if (probe)
        m.probe = TimedOperator(*probe, principal_slot());
    if (baths.size() != aux.size())
        throw DimensionError("one bath description per auxiliary is required");
    for (std::size_t l = 0; l < aux.size(); ++l) {
        const auto d = baths[l].cast<py::dict>();
        const auto da = static_cast<Eigen::Index>(aux[l]);
        const auto dsa = static_cast<Eigen::Index>(principal) * da;
        CompoundBath b;
        b.H_a = TimedOperator(d.contains("H_a") ? d["H_a"].cast<CMatrix>() : CMatrix::Zero(da, da), aux_slot(l + 1));
        b.H_sa = TimedOperator(d.contains("H_sa") ? d["H_sa"].cast<CMatrix>() : CMatrix::Zero(dsa, dsa),
                               principal_aux_slots(l + 1));
        if (d.contains("L1"))
            for (const auto& op : d["L1"].cast<std::vector<CMatrix>>())
                b.L1.emplace_back(op, principal_aux_slots(l + 1));
        if (d.contains("L2"))
            for (const auto& op : d["L2"].cast<std::vector<CMatrix>>())
                b.L2.emplace_back(op, aux_slot(l + 1));
        m.baths.push_back(std::move(b));
    }
    const auto violations = validate(m);
    if (!violations.empty()) {
        const auto& v = violations.front();
        throw ModelError(v.op + ": " + v.check + ": " + v.detail);
    }
    return m;
}

JointState joint_of(const EmbeddingModel& m, const CMatrix& rho) {
    if (rho.rows() != static_cast<Eigen::Index>(m.dims.total()) || rho.cols() != rho.rows())
        throw DimensionError("initial state does not match the model dimension");
    return {m.dims, rho};
}

py::dict summary_dict(const EnsembleSummary& s) {
    py::dict d;
    d["N"] = s.N;
    d["names"] = s.names;
    d["checkpoints"] = s.checkpoints;
    d["mean"] = s.mean_obs;
    d["stderr"] = s.stderr_obs;
    d["qme"] = s.qme_obs;
    d["innovation_mean"] = s.innovation_mean;
    d["innovation_var"] = s.innovation_var;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Markovian embeddings of non-Markovian open quantum systems";

    py::register_exception<Error>(m, "QembedError", PyExc_RuntimeError);

    m.def("kron", &kron, py::arg("a"), py::arg("b"));
    m.def(
        "partial_trace",
        [](const CMatrix& x, std::size_t principal, std::vector<std::size_t> aux, std::vector<std::size_t> keep) {
            return partial_trace(x, SubsystemDims(principal, std::move(aux)), keep);
        },
        py::arg("x"), py::arg("principal"), py::arg("aux"), py::arg("keep"),
        "Trace out every factor not in `keep` (0 = principal, l = auxiliary l).");
    m.def("gksl_rhs", [](const CMatrix& H, const std::vector<CMatrix>& Ls, const CMatrix& rho) {
        return gksl_rhs(H, Ls, rho);
    }, py::arg("H"), py::arg("Ls"), py::arg("rho"));
    m.def("philox4x32", &philox4x32, py::arg("counter"), py::arg("key"));
    m.def(
        "gaussians",
        [](std::uint64_t seed, std::uint64_t stream, std::size_t n) {
            GaussianStream g(seed, stream);
            std::vector<double> out(n);
            for (auto& x : out)
                x = g.next();
            return out;
        },
        py::arg("seed"), py::arg("stream"), py::arg("n"));

    py::class_<EmbeddingModel>(m, "Model")
        .def(py::init(&make_model), py::arg("principal"), py::arg("aux"), py::arg("H_s"),
             py::arg("probe") = py::none(), py::arg("baths") = py::list())
        .def_property_readonly("principal", [](const EmbeddingModel& e) { return e.dims.principal(); })
        .def_property_readonly("aux", [](const EmbeddingModel& e) { return e.dims.aux(); })
        .def_property_readonly("total", [](const EmbeddingModel& e) { return e.dims.total(); })
        .def_property_readonly("has_probe", [](const EmbeddingModel& e) { return e.probe.has_value(); })
        .def("is_closed", &EmbeddingModel::is_closed)
        .def("hamiltonian", [](const EmbeddingModel& e, double t) { return full_operators(e, t).hamiltonian; },
             py::arg("t") = 0.0)
        .def("couplings", [](const EmbeddingModel& e, double t) { return full_operators(e, t).couplings; },
             py::arg("t") = 0.0)
        .def(py::self == py::self);

    m.def("cascade_embedding", &cascade_embedding, py::arg("H_s"), py::arg("L_s"), py::arg("H_a"), py::arg("L_a"));
    m.def("direct_embedding", &direct_embedding, py::arg("H_s"), py::arg("H_a"), py::arg("H_sa"), py::arg("L_a"));
    m.def(
        "with_probe",
        [](EmbeddingModel model, const CMatrix& probe) {
            model.probe = TimedOperator(probe, principal_slot());
            return model;
        },
        py::arg("model"), py::arg("probe"));

    py::class_<BlockState>(m, "BlockState")
        .def("block", py::overload_cast<std::size_t, std::size_t>(&BlockState::block, py::const_), py::arg("j"),
             py::arg("k"))
        .def_property_readonly("aux_count", &BlockState::aux_count)
        .def("reduced", &BlockState::reduced)
        .def("total_trace", &BlockState::total_trace)
        .def("pairing_defect", &BlockState::pairing_defect)
        .def("to_joint", [](const BlockState& b) { return joint_from_blocks(b).rho; });

    m.def(
        "blocks_from_joint",
        [](const EmbeddingModel& model, const CMatrix& rho) { return blocks_from_joint(joint_of(model, rho)); },
        py::arg("model"), py::arg("rho"));
    m.def(
        "qme_rhs",
        [](const EmbeddingModel& model, const CMatrix& rho, double t) {
            return joint_from_blocks(block_qme_rhs(model, t, blocks_from_joint(joint_of(model, rho)))).rho;
        },
        py::arg("model"), py::arg("rho"), py::arg("t") = 0.0,
        "Block master-equation generator applied to a joint state, reassembled.");

    m.def(
        "solve_qme",
        [](const EmbeddingModel& model, const CMatrix& rho, double dt, double t_end, std::size_t stride) {
            const auto cfg = sim_config(dt, t_end, "none", 0, stride, Scheme::rk4);
            const auto series = solve_qme(model, blocks_from_joint(joint_of(model, rho)), cfg);
            std::vector<double> times;
            std::vector<CMatrix> reduced;
            for (const auto& s : series) {
                times.push_back(s.t);
                reduced.push_back(s.reduced);
            }
            return py::make_tuple(times, reduced);
        },
        py::arg("model"), py::arg("rho"), py::arg("dt"), py::arg("t_end"), py::arg("stride") = 1,
        "RK4 solution of the coupled master equation; returns (times, reduced states).");

    m.def(
        "simulate_trajectory",
        [](const EmbeddingModel& model, const CMatrix& rho, double dt, double t_end, std::uint64_t seed,
           const std::string& measurement, const std::string& representation, std::size_t stride) {
            const auto cfg = sim_config(dt, t_end, measurement, seed, stride, Scheme::euler_maruyama);
            const auto rep = representation_of(representation);
            const JointState js = joint_of(model, rho);
            const StateSnapshot init = rep == Representation::joint ? StateSnapshot(js) : blocks_from_joint(js);
            TrajectoryRecord rec;
            {
                py::gil_scoped_release release;
                rec = simulate_trajectory(model, init, cfg, rep);
            }
            std::vector<CMatrix> reduced;
            for (const auto& s : rec.snapshots)
                reduced.push_back(reduced_state(s));
            py::dict d;
            d["times"] = rec.times;
            d["dY"] = rec.dY;
            d["dI"] = rec.dI;
            d["mval"] = rec.mvals;
            d["snapshot_times"] = rec.snapshot_times;
            d["reduced"] = reduced;
            return d;
        },
        py::arg("model"), py::arg("rho"), py::arg("dt"), py::arg("t_end"), py::arg("seed") = 0,
        py::arg("measurement") = "amplitude", py::arg("representation") = "blocks", py::arg("stride") = 1);

    m.def(
        "crosscheck",
        [](const EmbeddingModel& model, const CMatrix& rho, double dt, double t_end, std::uint64_t seed,
           const std::string& measurement, const std::string& fault) {
            const auto cfg = sim_config(dt, t_end, measurement, seed, 1, Scheme::euler_maruyama);
            py::gil_scoped_release release;
            return crosscheck_paths(model, joint_of(model, rho), cfg, fault_of(fault));
        },
        py::arg("model"), py::arg("rho"), py::arg("dt"), py::arg("t_end"), py::arg("seed") = 0,
        py::arg("measurement") = "amplitude", py::arg("fault") = "none",
        "Largest joint-vs-block deviation along one shared noise path.");

    m.def(
        "closed_system_oracle",
        [](const EmbeddingModel& model, const CMatrix& rho, const std::vector<double>& times) {
            return closed_system_oracle(model, joint_of(model, rho), times);
        },
        py::arg("model"), py::arg("rho"), py::arg("times"));

    m.def(
        "ensemble_average",
        [](const EmbeddingModel& model, const CMatrix& rho, double dt, double t_end, std::uint64_t seed,
           std::size_t N, const std::string& measurement, std::size_t threads) {
            const auto cfg = sim_config(dt, t_end, measurement, seed, 1, Scheme::euler_maruyama);
            EnsembleOptions opt;
            opt.threads = threads;
            EnsembleSummary s;
            {
                py::gil_scoped_release release;
                s = ensemble_average(model, blocks_from_joint(joint_of(model, rho)), cfg, N,
                                     default_observables(model.dims.principal()), opt);
            }
            return summary_dict(s);
        },
        py::arg("model"), py::arg("rho"), py::arg("dt"), py::arg("t_end"), py::arg("seed") = 0, py::arg("N") = 100,
        py::arg("measurement") = "amplitude", py::arg("threads") = 1);

    m.def(
        "load_config",
        [](const std::filesystem::path& path) {
            const auto cfg = parse_config(path);
            py::dict d;
            d["model"] = cfg.model;
            d["initial"] = cfg.initial.rho;
            d["dt"] = cfg.sim.dt;
            d["t_end"] = cfg.sim.t_end;
            d["seed"] = cfg.sim.seed;
            d["normalized"] = emit_normalized(cfg);
            return d;
        },
        py::arg("path"));

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a qembed subcommand in-process; returns (exit code, stdout, stderr).");

#ifdef VERSION_INFO
#define QEMBED_STR(x) #x
#define QEMBED_XSTR(x) QEMBED_STR(x)
    m.attr("__version__") = QEMBED_XSTR(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}

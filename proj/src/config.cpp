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

#include "qembed/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace qembed {

using nlohmann::json;

namespace {

std::string summarize(const std::vector<ConfigIssue>& issues) {
    std::string out = std::to_string(issues.size()) + " config issue(s)";
    for (const auto& i : issues)
        out += "\n  " + (i.path.empty() ? std::string("<root>") : i.path) + ": " + i.reason;
    return out;
}

/// Collects issues while walking the document.
class Reader {
public:
    std::vector<ConfigIssue> issues;

    void add(std::string path, std::string reason) { issues.push_back({std::move(path), std::move(reason)}); }

    void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
        for (const auto& [key, _] : obj.items())
            if (!allowed.count(key))
                add(join(path, key), "unknown key");
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
    static std::string index(const std::string& path, std::size_t i) {
        return path + "[" + std::to_string(i) + "]";
    }

    std::optional<double> real(const json& j, const std::string& path) {
        if (!j.is_number()) {
            add(path, "type: expected a number");
            return std::nullopt;
        }
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            add(path, "finite: value is not finite");
            return std::nullopt;
        }
        return v;
    }

    std::optional<std::uint64_t> unsigned_int(const json& j, const std::string& path) {
        if (!j.is_number_unsigned()) {
            add(path, "type: expected a non-negative integer");
            return std::nullopt;
        }
        return j.get<std::uint64_t>();
    }

    std::optional<std::string> string(const json& j, const std::string& path) {
        if (!j.is_string()) {
            add(path, "type: expected a string");
            return std::nullopt;
        }
        return j.get<std::string>();
    }

    std::optional<Complex> entry(const json& j, const std::string& path) {
        if (j.is_number()) {
            auto v = real(j, path);
            return v ? std::optional<Complex>(Complex(*v, 0.0)) : std::nullopt;
        }
        if (j.is_array() && j.size() == 2) {
            auto re = real(j[0], path + "[0]");
            auto im = real(j[1], path + "[1]");
            if (re && im)
                return Complex(*re, *im);
            return std::nullopt;
        }
        add(path, "type: expected a number or a [re, im] pair");
        return std::nullopt;
    }

    /// Row-major nested array; every row the same length.
    std::optional<CMatrix> matrix(const json& j, const std::string& path) {
        if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
            add(path, "type: expected a non-empty array of rows");
            return std::nullopt;
        }
        const std::size_t rows = j.size(), cols = j[0].size();
        CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        bool ok = true;
        for (std::size_t r = 0; r < rows; ++r) {
            const auto rp = index(path, r);
            if (!j[r].is_array() || j[r].size() != cols) {
                add(rp, "dimension: rows must all have " + std::to_string(cols) + " entries");
                ok = false;
                continue;
            }
            for (std::size_t c = 0; c < cols; ++c) {
                auto v = entry(j[r][c], index(rp, c));
                if (v)
                    m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *v;
                else
                    ok = false;
            }
        }
        return ok ? std::optional<CMatrix>(std::move(m)) : std::nullopt;
    }

    std::optional<CMatrix> square(const json& j, const std::string& path, std::optional<Eigen::Index> dim) {
        auto m = matrix(j, path);
        if (!m)
            return m;
        if (m->rows() != m->cols()) {
            add(path, "dimension: matrix is not square");
            return std::nullopt;
        }
        if (dim && m->rows() != *dim) {
            add(path, "dimension: expected " + std::to_string(*dim) + "x" + std::to_string(*dim));
            return std::nullopt;
        }
        return m;
    }

    /// A matrix, or {"segments": [{"t": ..., "matrix": ...}, ...]}.
    std::optional<TimedOperator> timed(const json& j, const std::string& path, Slots slots) {
        if (!j.is_object()) {
            auto m = matrix(j, path);
            if (!m)
                return std::nullopt;
            return TimedOperator(std::move(*m), std::move(slots));
        }
        check_keys(j, path, {"segments"});
        if (!j.contains("segments") || !j["segments"].is_array() || j["segments"].empty()) {
            add(join(path, "segments"), "type: expected a non-empty array");
            return std::nullopt;
        }
        std::vector<Segment> segs;
        bool ok = true;
        for (std::size_t i = 0; i < j["segments"].size(); ++i) {
            const auto& s = j["segments"][i];
            const auto sp = index(join(path, "segments"), i);
            if (!s.is_object() || !s.contains("t") || !s.contains("matrix")) {
                add(sp, "type: expected {\"t\": ..., \"matrix\": ...}");
                ok = false;
                continue;
            }
            check_keys(s, sp, {"t", "matrix"});
            auto t = real(s["t"], join(sp, "t"));
            auto m = matrix(s["matrix"], join(sp, "matrix"));
            if (t && m)
                segs.push_back({*t, std::move(*m)});
            else
                ok = false;
        }
        if (!ok)
            return std::nullopt;
        try {
            return TimedOperator(std::move(segs), std::move(slots));
        } catch (const Error& e) {
            add(path, std::string("schedule: ") + e.what());
            return std::nullopt;
        }
    }

    std::vector<TimedOperator> timed_list(const json& obj, const std::string& key, const std::string& path,
                                          const Slots& slots, bool& ok) {
        std::vector<TimedOperator> out;
        if (!obj.contains(key))
            return out;
        const auto lp = join(path, key);
        if (!obj[key].is_array()) {
            add(lp, "type: expected an array of operators");
            ok = false;
            return out;
        }
        for (std::size_t i = 0; i < obj[key].size(); ++i) {
            auto op = timed(obj[key][i], index(lp, i), slots);
            if (op)
                out.push_back(std::move(*op));
            else
                ok = false;
        }
        return out;
    }
};

std::optional<SubsystemDims> read_dims(Reader& rd, const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("principal")) {
        rd.add(path, "type: expected {\"principal\": d, \"aux\": [...]}");
        return std::nullopt;
    }
    rd.check_keys(j, path, {"principal", "aux"});
    auto p = rd.unsigned_int(j["principal"], Reader::join(path, "principal"));
    std::vector<std::size_t> aux;
    bool ok = p.has_value();
    if (j.contains("aux")) {
        const auto ap = Reader::join(path, "aux");
        if (!j["aux"].is_array()) {
            rd.add(ap, "type: expected an array of dimensions");
            ok = false;
        } else {
            for (std::size_t i = 0; i < j["aux"].size(); ++i) {
                auto d = rd.unsigned_int(j["aux"][i], Reader::index(ap, i));
                if (d)
                    aux.push_back(static_cast<std::size_t>(*d));
                else
                    ok = false;
            }
        }
    }
    if (!ok)
        return std::nullopt;
    try {
        return SubsystemDims(static_cast<std::size_t>(*p), aux);
    } catch (const Error& e) {
        rd.add(path, std::string("dimension: ") + e.what());
        return std::nullopt;
    }
}

void require_hermitian(Reader& rd, const std::optional<CMatrix>& m, const std::string& path, bool& ok) {
    if (m && !is_hermitian(*m)) {
        rd.add(path, "hermiticity: defect " + std::to_string(hermiticity_defect(*m)));
        ok = false;
    }
}

/// "cascade": {H_s, L_s, H_a, L_a} or "direct": {H_s, H_a, H_sa, L_a}.
std::optional<EmbeddingModel> read_shorthand(Reader& rd, const json& j, const std::string& path, bool cascade) {
    const std::vector<std::string> keys = cascade ? std::vector<std::string>{"H_s", "L_s", "H_a", "L_a"}
                                                  : std::vector<std::string>{"H_s", "H_a", "H_sa", "L_a"};
    if (!j.is_object()) {
        rd.add(path, "type: expected an object");
        return std::nullopt;
    }
    rd.check_keys(j, path, std::set<std::string>(keys.begin(), keys.end()));
    std::map<std::string, CMatrix> ops;
    bool ok = true;
    for (const auto& k : keys) {
        const auto kp = Reader::join(path, k);
        if (!j.contains(k)) {
            rd.add(kp, "missing: required");
            ok = false;
            continue;
        }
        auto m = rd.square(j[k], kp, std::nullopt);
        if (!m) {
            ok = false;
            continue;
        }
        if (k.front() == 'H')
            require_hermitian(rd, m, kp, ok);
        ops[k] = std::move(*m);
    }
    if (!ok)
        return std::nullopt;
    try {
        if (cascade)
            return cascade_embedding(ops["H_s"], ops["L_s"], ops["H_a"], ops["L_a"]);
        return direct_embedding(ops["H_s"], ops["H_a"], ops["H_sa"], ops["L_a"]);
    } catch (const Error& e) {
        rd.add(path, std::string("dimension: ") + e.what());
        return std::nullopt;
    }
}

std::optional<EmbeddingModel> read_model(Reader& rd, const json& j) {
    const std::string path = "model";
    if (!j.is_object()) {
        rd.add(path, "type: expected an object");
        return std::nullopt;
    }
    std::optional<EmbeddingModel> model;
    bool ok = true;
    const bool is_cascade = j.contains("cascade"), is_direct = j.contains("direct");
    if (is_cascade || is_direct) {
        rd.check_keys(j, path, {"cascade", "direct", "probe"});
        if (is_cascade && is_direct) {
            rd.add(path, "shorthand: give either cascade or direct, not both");
            return std::nullopt;
        }
        model = read_shorthand(rd, is_cascade ? j["cascade"] : j["direct"],
                               Reader::join(path, is_cascade ? "cascade" : "direct"), is_cascade);
        if (!model)
            ok = false;
    } else {
        rd.check_keys(j, path, {"dims", "H_s", "probe", "baths"});
        auto dims = j.contains("dims") ? read_dims(rd, j["dims"], "model.dims") : std::nullopt;
        if (!j.contains("dims"))
            rd.add("model.dims", "missing: required");
        if (!dims)
            return std::nullopt;
        model.emplace();
        model->dims = *dims;
        if (!j.contains("H_s")) {
            rd.add("model.H_s", "missing: required");
            ok = false;
        } else if (auto h = rd.timed(j["H_s"], "model.H_s", principal_slot())) {
            model->H_s = std::move(*h);
        } else {
            ok = false;
        }
        const std::size_t M = dims->num_baths();
        const json baths = j.contains("baths") ? j["baths"] : json::array();
        if (!baths.is_array()) {
            rd.add("model.baths", "type: expected an array");
            ok = false;
        } else if (baths.size() != M) {
            rd.add("model.baths", "count: " + std::to_string(baths.size()) + " baths for " +
                                      std::to_string(M) + " auxiliaries");
            ok = false;
        } else {
            for (std::size_t l = 0; l < M; ++l) {
                const auto bp = Reader::index("model.baths", l);
                const auto& b = baths[l];
                if (!b.is_object()) {
                    rd.add(bp, "type: expected an object");
                    ok = false;
                    continue;
                }
                rd.check_keys(b, bp, {"H_a", "H_sa", "L1", "L2"});
                CompoundBath bath;
                const auto da = static_cast<Eigen::Index>(dims->aux()[l]);
                const auto dsa = static_cast<Eigen::Index>(dims->principal()) * da;
                // Absent Hamiltonians default to zero.
                auto opt = [&](const char* key, Slots slots, Eigen::Index dim) -> std::optional<TimedOperator> {
                    if (!b.contains(key))
                        return TimedOperator(CMatrix::Zero(dim, dim), std::move(slots));
                    return rd.timed(b[key], Reader::join(bp, key), std::move(slots));
                };
                auto ha = opt("H_a", aux_slot(l + 1), da);
                auto hsa = opt("H_sa", principal_aux_slots(l + 1), dsa);
                if (ha && hsa) {
                    bath.H_a = std::move(*ha);
                    bath.H_sa = std::move(*hsa);
                } else {
                    ok = false;
                }
                bath.L1 = rd.timed_list(b, "L1", bp, principal_aux_slots(l + 1), ok);
                bath.L2 = rd.timed_list(b, "L2", bp, aux_slot(l + 1), ok);
                model->baths.push_back(std::move(bath));
            }
        }
    }
    if (model && j.contains("probe")) {
        if (auto p = rd.timed(j["probe"], "model.probe", principal_slot()))
            model->probe = std::move(*p);
        else
            ok = false;
    }
    if (!ok || !model)
        return std::nullopt;
    const auto violations = validate(*model);
    for (const auto& v : violations)
        rd.add("model." + v.op, v.check + ": " + v.detail + " (segment " + std::to_string(v.segment) + ")");
    if (!violations.empty())
        return std::nullopt;
    return model;
}

std::optional<CMatrix> named_state(const std::string& name, Eigen::Index dim) {
    if (name == "mixed")
        return CMatrix(identity(dim) / static_cast<double>(dim));
    if (dim != 2)
        return std::nullopt;
    if (name == "excited")
        return qubit::excited();
    if (name == "ground")
        return qubit::ground();
    if (name == "plus")
        return qubit::plus();
    return std::nullopt;
}

std::optional<CMatrix> read_factor_state(Reader& rd, const json& j, const std::string& path, Eigen::Index dim) {
    if (j.is_string()) {
        auto s = named_state(j.get<std::string>(), dim);
        if (!s)
            rd.add(path, "state: unknown name for dimension " + std::to_string(dim) +
                             " (mixed; excited, ground, plus for qubits)");
        return s;
    }
    return rd.square(j, path, dim);
}

std::optional<JointState> read_initial(Reader& rd, const json& j, const SubsystemDims& dims) {
    const std::string path = "initial";
    if (!j.is_object()) {
        rd.add(path, "type: expected {\"principal\", \"aux\"} or {\"joint\"}");
        return std::nullopt;
    }
    std::optional<JointState> out;
    if (j.contains("joint")) {
        rd.check_keys(j, path, {"joint"});
        auto m = rd.square(j["joint"], "initial.joint", static_cast<Eigen::Index>(dims.total()));
        if (m)
            out = JointState{dims, std::move(*m)};
    } else {
        rd.check_keys(j, path, {"principal", "aux"});
        if (!j.contains("principal")) {
            rd.add("initial.principal", "missing: required");
            return std::nullopt;
        }
        auto p = read_factor_state(rd, j["principal"], "initial.principal",
                                   static_cast<Eigen::Index>(dims.principal()));
        const json aux = j.contains("aux") ? j["aux"] : json::array();
        if (!aux.is_array() || aux.size() != dims.num_baths()) {
            rd.add("initial.aux", "count: expected " + std::to_string(dims.num_baths()) + " auxiliary states");
            return std::nullopt;
        }
        std::vector<CMatrix> factors;
        bool ok = p.has_value();
        for (std::size_t l = 0; l < aux.size(); ++l) {
            auto a = read_factor_state(rd, aux[l], Reader::index("initial.aux", l),
                                       static_cast<Eigen::Index>(dims.aux()[l]));
            if (a)
                factors.push_back(std::move(*a));
            else
                ok = false;
        }
        if (!ok)
            return std::nullopt;
        CMatrix rho = *p;
        for (const auto& f : factors)
            rho = kron(rho, f);
        out = JointState{dims, std::move(rho)};
    }
    if (!out)
        return out;
    bool ok = true;
    require_hermitian(rd, out->rho, path, ok);
    if (!ok)
        return std::nullopt;
    const double tr = out->rho.trace().real();
    if (std::abs(tr - 1.0) > 1e-9) {
        rd.add(path, "trace: " + std::to_string(tr) + " differs from 1");
        ok = false;
    }
    const auto psd = psd_check(out->rho, kPsdTol);
    if (!psd.positive) {
        rd.add(path, "positivity: minimum eigenvalue " + std::to_string(psd.min_eigenvalue));
        ok = false;
    }
    return ok ? out : std::nullopt;
}

template <class Enum>
std::optional<Enum> read_enum(Reader& rd, const json& j, const std::string& path,
                              const std::vector<std::pair<std::string, Enum>>& names) {
    auto s = rd.string(j, path);
    if (!s)
        return std::nullopt;
    for (const auto& [name, value] : names)
        if (*s == name)
            return value;
    std::string allowed;
    for (const auto& [name, _] : names)
        allowed += (allowed.empty() ? "" : ", ") + name;
    rd.add(path, "value: expected one of " + allowed);
    return std::nullopt;
}

const std::vector<std::pair<std::string, Scheme>> kSchemes{{"euler-maruyama", Scheme::euler_maruyama},
                                                           {"rk4", Scheme::rk4}};
const std::vector<std::pair<std::string, Measurement>> kMeasurements{
    {"none", Measurement::none}, {"amplitude", Measurement::amplitude}, {"phase", Measurement::phase}};
const std::vector<std::pair<std::string, Representation>> kRepresentations{
    {"blocks", Representation::blocks}, {"joint", Representation::joint}};

template <class Enum>
std::string enum_name(Enum v, const std::vector<std::pair<std::string, Enum>>& names) {
    for (const auto& [name, value] : names)
        if (value == v)
            return name;
    return "?";
}

SimConfig read_sim(Reader& rd, const json& j, bool has_probe) {
    SimConfig sim;
    sim.measurement = has_probe ? Measurement::amplitude : Measurement::none;
    if (!j.is_object()) {
        rd.add("sim", "type: expected an object");
        return sim;
    }
    rd.check_keys(j, "sim", {"dt", "t_end", "scheme", "measurement", "seed", "snapshot_stride"});
    bool ok = true;
    auto num = [&](const char* key, double& dst) {
        if (!j.contains(key))
            return;
        if (auto v = rd.real(j[key], Reader::join("sim", key)))
            dst = *v;
        else
            ok = false;
    };
    num("dt", sim.dt);
    num("t_end", sim.t_end);
    if (j.contains("scheme")) {
        if (auto s = read_enum(rd, j["scheme"], "sim.scheme", kSchemes))
            sim.scheme = *s;
        else
            ok = false;
    }
    if (j.contains("measurement")) {
        if (auto m = read_enum(rd, j["measurement"], "sim.measurement", kMeasurements))
            sim.measurement = *m;
        else
            ok = false;
    }
    if (j.contains("seed")) {
        if (auto s = rd.unsigned_int(j["seed"], "sim.seed"))
            sim.seed = *s;
        else
            ok = false;
    }
    if (j.contains("snapshot_stride")) {
        if (auto s = rd.unsigned_int(j["snapshot_stride"], "sim.snapshot_stride"))
            sim.snapshot_stride = static_cast<std::size_t>(*s);
        else
            ok = false;
    }
    if (ok) {
        try {
            sim.validate();
        } catch (const Error& e) {
            rd.add("sim", std::string("value: ") + e.what());
        }
    }
    if (sim.measurement != Measurement::none && !has_probe)
        rd.add("sim.measurement", "value: measurement requested but the model has no probe");
    return sim;
}

std::optional<Observable> named_observable(const std::string& name, std::size_t dim) {
    for (auto& o : default_observables(dim))
        if (o.name == name)
            return o;
    // Level populations p0, p1, ... are available for every dimension.
    if (name.size() > 1 && name[0] == 'p' && name.find_first_not_of("0123456789", 1) == std::string::npos) {
        const auto k = std::stoul(name.substr(1));
        if (k < dim) {
            const auto d = static_cast<Eigen::Index>(dim);
            CMatrix op = CMatrix::Zero(d, d);
            op(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
            return Observable{name, op};
        }
    }
    return std::nullopt;
}

RunOptions read_run(Reader& rd, const json& j, std::size_t principal_dim) {
    RunOptions run;
    if (!j.is_object()) {
        rd.add("run", "type: expected an object");
        return run;
    }
    rd.check_keys(j, "run", {"N", "observables", "representation", "threads", "checkpoints", "mutation_check"});
    auto count = [&](const char* key, std::size_t& dst, std::size_t min) {
        if (!j.contains(key))
            return;
        const auto p = Reader::join("run", key);
        if (auto v = rd.unsigned_int(j[key], p)) {
            if (*v < min)
                rd.add(p, "value: must be at least " + std::to_string(min));
            else
                dst = static_cast<std::size_t>(*v);
        }
    };
    count("N", run.N, 2);
    count("threads", run.threads, 0);
    count("checkpoints", run.checkpoints, 1);
    if (j.contains("representation"))
        if (auto r = read_enum(rd, j["representation"], "run.representation", kRepresentations))
            run.representation = *r;
    if (j.contains("mutation_check")) {
        if (j["mutation_check"].is_boolean())
            run.mutation_check = j["mutation_check"].get<bool>();
        else
            rd.add("run.mutation_check", "type: expected a boolean");
    }
    if (j.contains("observables")) {
        const auto& obs = j["observables"];
        if (!obs.is_array()) {
            rd.add("run.observables", "type: expected an array");
            return run;
        }
        for (std::size_t i = 0; i < obs.size(); ++i) {
            const auto op = Reader::index("run.observables", i);
            if (obs[i].is_string()) {
                if (auto o = named_observable(obs[i].get<std::string>(), principal_dim))
                    run.observables.push_back(std::move(*o));
                else
                    rd.add(op, "value: unknown observable name");
                continue;
            }
            if (!obs[i].is_object() || !obs[i].contains("name") || !obs[i].contains("matrix")) {
                rd.add(op, "type: expected a name or {\"name\", \"matrix\"}");
                continue;
            }
            rd.check_keys(obs[i], op, {"name", "matrix"});
            auto name = rd.string(obs[i]["name"], Reader::join(op, "name"));
            auto m = rd.square(obs[i]["matrix"], Reader::join(op, "matrix"),
                               static_cast<Eigen::Index>(principal_dim));
            bool ok = true;
            require_hermitian(rd, m, Reader::join(op, "matrix"), ok);
            if (name && m && ok)
                run.observables.push_back({*name, std::move(*m)});
        }
    }
    if (run.observables.empty())
        run.observables = default_observables(principal_dim);
    return run;
}

json emit_matrix(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

json emit_timed(const TimedOperator& op) {
    if (op.is_constant())
        return emit_matrix(op.segments().front().matrix);
    json segs = json::array();
    for (const auto& s : op.segments())
        segs.push_back({{"t", s.t_start}, {"matrix", emit_matrix(s.matrix)}});
    return {{"segments", segs}};
}

} // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error(summarize(issues)), issues_(std::move(issues)) {}

ExperimentConfig parse_config_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::vector<ConfigIssue>{{"", std::string("syntax: ") + e.what()}});
    }
    Reader rd;
    if (!doc.is_object())
        throw ConfigError(std::vector<ConfigIssue>{{"", "type: expected a JSON object"}});
    rd.check_keys(doc, "", {"model", "initial", "sim", "run"});

    ExperimentConfig cfg;
    std::optional<EmbeddingModel> model;
    if (!doc.contains("model"))
        rd.add("model", "missing: required");
    else
        model = read_model(rd, doc["model"]);

    std::optional<JointState> initial;
    if (model) {
        if (!doc.contains("initial"))
            rd.add("initial", "missing: required");
        else
            initial = read_initial(rd, doc["initial"], model->dims);
    }
    const bool has_probe = model && model->probe.has_value();
    cfg.sim = read_sim(rd, doc.contains("sim") ? doc["sim"] : json::object(), has_probe);
    if (model)
        cfg.run = read_run(rd, doc.contains("run") ? doc["run"] : json::object(), model->dims.principal());

    if (!rd.issues.empty())
        throw ConfigError(std::move(rd.issues));
    cfg.model = std::move(*model);
    cfg.initial = std::move(*initial);
    return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(std::vector<ConfigIssue>{{"", "file: cannot read " + path.string()}});
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

std::string emit_normalized(const ExperimentConfig& config) {
    const auto& m = config.model;
    json model;
    model["dims"] = {{"principal", m.dims.principal()}, {"aux", m.dims.aux()}};
    model["H_s"] = emit_timed(m.H_s);
    if (m.probe)
        model["probe"] = emit_timed(*m.probe);
    json baths = json::array();
    for (const auto& b : m.baths) {
        json jb;
        jb["H_a"] = emit_timed(b.H_a);
        jb["H_sa"] = emit_timed(b.H_sa);
        jb["L1"] = json::array();
        for (const auto& op : b.L1)
            jb["L1"].push_back(emit_timed(op));
        jb["L2"] = json::array();
        for (const auto& op : b.L2)
            jb["L2"].push_back(emit_timed(op));
        baths.push_back(std::move(jb));
    }
    model["baths"] = std::move(baths);

    const auto& s = config.sim;
    json sim = {{"dt", s.dt},
                {"t_end", s.t_end},
                {"scheme", enum_name(s.scheme, kSchemes)},
                {"measurement", enum_name(s.measurement, kMeasurements)},
                {"seed", s.seed},
                {"snapshot_stride", s.snapshot_stride}};
    const auto& r = config.run;
    json obs = json::array();
    for (const auto& o : r.observables)
        obs.push_back({{"name", o.name}, {"matrix", emit_matrix(o.op)}});
    json run = {{"N", r.N},
                {"observables", obs},
                {"representation", enum_name(r.representation, kRepresentations)},
                {"threads", r.threads},
                {"checkpoints", r.checkpoints},
                {"mutation_check", r.mutation_check}};
    json doc = {{"model", model}, {"initial", {{"joint", emit_matrix(config.initial.rho)}}}, {"sim", sim}, {"run", run}};
    return doc.dump(2) + "\n";
}

} // namespace qembed

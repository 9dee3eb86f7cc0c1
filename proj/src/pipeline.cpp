#include "embjet/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <mutex>
#include <thread>

#include "embjet/embedding.hpp"
#include "embjet/metric.hpp"

namespace embjet {

namespace {

using nlohmann::json;

const std::vector<std::string> kStageOrder = {
    "normal-form", "admissibility", "cartan-janet", "singular-data",
    "solve-points", "characteristics", "conoid"};

struct PipelineInput {
    int n = 0;
    int K = 0;
    Mode mode = Mode::exact;
    std::optional<MetricJet> metric;
    std::optional<Jet> symbol;    // scalar symbol jet in 2n variables
    std::optional<Jet> surface;   // jet in n variables
};

Scalar parse_rational(const json& j, Mode mode) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
        !j[1].is_number_integer())
        throw SchemaError("expected a rational as [num, den]");
    Scalar q = Scalar::rational(j[0].get<long>(), j[1].get<long>());
    return mode == Mode::exact ? q : q.to_float();
}

// one term: [e_1..e_nvars, num, den] (rational, either mode) or
// [e_1..e_nvars, value] (float mode only)
void add_term(Jet& jet, const json& t, int nvars, Mode mode) {
    if (!t.is_array() ||
        (t.size() != size_t(nvars) + 2 && t.size() != size_t(nvars) + 1))
        throw SchemaError("term arity does not match nvars");
    MultiIndex mi(nvars);
    for (int i = 0; i < nvars; ++i) {
        if (!t[i].is_number_integer() || t[i].get<long>() < 0)
            throw SchemaError("term exponents must be non-negative integers");
        mi[i] = t[i].get<int>();
    }
    Scalar c;
    if (t.size() == size_t(nvars) + 2) {
        c = Scalar::rational(t[nvars].get<long>(), t[nvars + 1].get<long>());
        if (mode == Mode::floating) c = c.to_float();
    } else {
        if (mode == Mode::exact)
            throw SchemaError("float term coefficient in exact mode");
        c = Scalar::real(t[nvars].get<double>());
    }
    jet.set_coeff(mi, jet.coeff(mi) + c);
}

// generator term: {"sin"|"cos"|"exp": [num, den], "var": i, "coeff": [num, den]}
void add_generator(Jet& jet, const json& t, int nvars, Mode mode, int order) {
    const char* fns[] = {"sin", "cos", "exp"};
    for (const char* fn : fns) {
        if (!t.contains(fn)) continue;
        Scalar lam = parse_rational(t[fn], mode);
        if (!t.contains("var") || !t["var"].is_number_integer())
            throw SchemaError("generator term needs a 1-based \"var\"");
        int v = t["var"].get<int>() - 1;
        if (v < 0 || v >= nvars) throw SchemaError("generator \"var\" out of range");
        Jet gj = fn == fns[0]   ? sin_jet(lam, v, nvars, order)
                 : fn == fns[1] ? cos_jet(lam, v, nvars, order)
                                : exp_jet(lam, v, nvars, order);
        if (t.contains("coeff")) gj = gj.scale(parse_rational(t["coeff"], mode));
        jet += gj;
        return;
    }
    throw SchemaError("generator term must be one of sin/cos/exp");
}

Jet parse_jet(const json& terms, int nvars, Mode mode, int order) {
    Jet jet(nvars, order, mode);
    if (!terms.is_array()) throw SchemaError("\"terms\" must be an array");
    for (const auto& t : terms) {
        if (t.is_object())
            add_generator(jet, t, nvars, mode, order);
        else
            add_term(jet, t, nvars, mode);
    }
    return jet;
}

PipelineInput load_input(const PipelineConfig& cfg) {
    std::ifstream in(cfg.input);
    if (!in) throw SchemaError("cannot open input file " + cfg.input);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("input is not valid JSON: ") + e.what());
    }
    PipelineInput p;
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw SchemaError("missing integer field \"n\"");
    p.n = j["n"].get<int>();
    if (p.n < 1) throw SchemaError("\"n\" must be positive");
    p.K = j.value("K", cfg.K);
    std::string mode = !cfg.mode.empty() ? cfg.mode : j.value("mode", "exact");
    if (mode != "exact" && mode != "float")
        throw SchemaError("\"mode\" must be \"exact\" or \"float\"");
    p.mode = mode == "exact" ? Mode::exact : Mode::floating;

    if (j.contains("entries")) {
        std::vector<std::vector<Jet>> e(
            p.n, std::vector<Jet>(p.n, Jet(p.n, p.K, p.mode)));
        for (const auto& ent : j["entries"]) {
            if (!ent.contains("i") || !ent.contains("j") || !ent.contains("terms"))
                throw SchemaError("metric entry needs \"i\", \"j\", \"terms\"");
            int i = ent["i"].get<int>() - 1, k = ent["j"].get<int>() - 1;
            if (i < 0 || k < 0 || i >= p.n || k >= p.n)
                throw SchemaError("metric entry index out of range");
            Jet v = parse_jet(ent["terms"], p.n, p.mode, p.K);
            e[i][k] = v;
            e[k][i] = v;
        }
        p.metric = make_metric(p.n, e);
    }
    if (j.contains("symbol")) {
        if (!j["symbol"].contains("terms"))
            throw SchemaError("\"symbol\" needs \"terms\" in 2n variables");
        p.symbol = parse_jet(j["symbol"]["terms"], 2 * p.n, p.mode, p.K);
    }
    if (j.contains("surface")) {
        if (!j["surface"].contains("terms"))
            throw SchemaError("\"surface\" needs \"terms\" in n variables");
        p.surface = parse_jet(j["surface"]["terms"], p.n, p.mode, p.K);
    }
    if (!p.metric && !p.symbol)
        throw SchemaError("input must define \"entries\" (metric) or \"symbol\"");
    return p;
}

std::vector<std::string> canonical_stages(const std::vector<std::string>& req) {
    for (const auto& s : req)
        if (std::find(kStageOrder.begin(), kStageOrder.end(), s) == kStageOrder.end())
            throw SchemaError("unknown stage \"" + s + "\"");
    std::vector<std::string> out;
    for (const auto& s : kStageOrder)
        if (std::find(req.begin(), req.end(), s) != req.end()) out.push_back(s);
    return out;
}

void check_dependencies(const std::vector<std::string>& stages,
                        const PipelineInput& input) {
    auto has = [&](const char* s) {
        return std::find(stages.begin(), stages.end(), s) != stages.end();
    };
    auto need_metric = [&](const char* s) {
        if (has(s) && !input.metric)
            throw SchemaError(std::string("stage ") + s + " requires a metric input");
    };
    need_metric("normal-form");
    need_metric("admissibility");
    need_metric("cartan-janet");
    if (has("singular-data") && !has("admissibility"))
        throw SchemaError("stage singular-data requires stage admissibility");
    if (has("solve-points") && !has("singular-data"))
        throw SchemaError("stage solve-points requires stage singular-data");
    if (has("characteristics") && !input.symbol && !has("singular-data"))
        throw SchemaError(
            "stage characteristics requires stage singular-data or a scalar symbol");
    if (has("conoid") && !has("characteristics"))
        throw SchemaError("stage conoid requires stage characteristics");
}

Scalar parse_eps(const std::string& s) {
    auto slash = s.find('/');
    try {
        long num = std::stol(s.substr(0, slash));
        long den = slash == std::string::npos ? 1 : std::stol(s.substr(slash + 1));
        return Scalar::rational(num, den);
    } catch (const std::exception&) {
        throw SchemaError("eps must be a rational \"num/den\"");
    }
}

// --- serialization ----------------------------------------------------------

json jet_to_json(const Jet& a) {
    json terms = json::array();
    for (auto& [mi, c] : a.terms()) {
        json t = json::array();
        for (int i = 0; i < mi.nvars(); ++i) t.push_back(mi[i]);
        if (c.mode() == Mode::exact) {
            t.push_back(c.rat().get_num().get_str());
            t.push_back(c.rat().get_den().get_str());
        } else {
            t.push_back(c.to_double());
        }
        terms.push_back(t);
    }
    return {{"nvars", a.nvars()}, {"order", a.order()}, {"terms", terms}};
}

json scalar_to_json(const Scalar& c) {
    if (c.mode() == Mode::exact) return c.rat().get_str();
    return c.to_double();
}

json report_to_json(const ResidualReport& r) {
    json entries = json::array();
    for (auto& e : r.entries)
        entries.push_back({{"id", e.name},
                           {"max_abs", e.max_abs},
                           {"order", e.residual.order()}});
    return {{"pass", r.pass},
            {"tolerance", r.tolerance},
            {"order_checked", r.order_checked},
            {"entries", entries}};
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << body;
}

// --- the pipeline proper ----------------------------------------------------

struct PipelineState {
    PipelineInput input;
    MetricJet current;                       // possibly normal-formed
    std::optional<AdmissibleMetric> adm;
    std::optional<CauchyData> data;
    std::optional<PrincipalSymbol> sym;
    std::optional<Jet> surface;
    std::vector<double> vertex;
    json report;
    json embedding;
    bool all_pass = true;
};

void stage_normal_form(PipelineState& st) {
    json r;
    if (st.current.is_normal_form()) {
        r["already_normal"] = true;
        r["pass"] = true;
    } else {
        NormalFormResult nf = normal_form_transform(st.current, Scalar::rational(1, 8));
        st.current = nf.normal;
        r["already_normal"] = false;
        r["eps_used"] = scalar_to_json(nf.eps_used);
        r["max_cross_coeff"] = nf.max_cross_coeff;
        r["order"] = nf.normal.order();
        r["pass"] = st.current.mode() == Mode::exact ? nf.max_cross_coeff == 0.0
                                                     : nf.max_cross_coeff <= 1e-9;
    }
    st.all_pass = st.all_pass && r["pass"].get<bool>();
    st.report["stages"]["normal-form"] = r;
}

void stage_admissibility(PipelineState& st) {
    AdmissibilityResult res = check_admissible(st.current, 1);
    PositivityReport pos = positivity_certificate(st.current);
    json r;
    r["ok"] = res.ok();
    r["violations"] = res.violations;
    r["positivity"] = {{"b_zero_at_origin", pos.b_zero_at_origin},
                       {"max_gap", pos.max_gap},
                       {"inequality_holds", pos.inequality_holds}};
    if (res.ok()) {
        st.adm = res.metric;
        r["l"] = res.metric->l;
        r["F_at_origin"] = scalar_to_json(res.metric->F.constant_term());
    }
    r["pass"] = res.ok();
    st.all_pass = st.all_pass && res.ok();
    st.report["stages"]["admissibility"] = r;
}

void stage_cartan_janet(PipelineState& st, const PipelineConfig& cfg) {
    EmbeddingJet u = embed_cartan_janet(st.current, cfg.K);
    ResidualReport rep = first_order_residual(u, st.current);
    json r;
    r["ambient"] = u.ambient;
    r["residual"] = report_to_json(rep);
    r["pass"] = rep.pass;
    st.all_pass = st.all_pass && rep.pass;
    st.report["stages"]["cartan-janet"] = r;

    json comps = json::array();
    for (auto& c : u.comp) comps.push_back(jet_to_json(c));
    st.embedding["cartan_janet"] = {{"ambient", u.ambient}, {"components", comps}};
}

void stage_singular_data(PipelineState& st, const PipelineConfig& cfg) {
    CauchyData data = build_singular_data(*st.adm, parse_eps(cfg.eps), cfg.K);
    ResidualReport rep = constraint_residual(data, *st.adm);
    int m = st.input.n - 1;
    MultiIndex e1(m);
    e1[0] = 1;
    json r;
    r["ambient"] = data.ambient;
    r["eps_used"] = scalar_to_json(data.scale_used);
    r["Delta"] = jet_to_json(data.Delta);
    r["Delta0_at_origin"] = scalar_to_json(data.Delta0.constant_term());
    r["d1Delta_at_origin"] = scalar_to_json(data.Delta.coeff(e1));
    r["residual"] = report_to_json(rep);
    r["pass"] = rep.pass;
    st.all_pass = st.all_pass && rep.pass;
    st.data = std::move(data);
    st.report["stages"]["singular-data"] = r;
}

void stage_solve_points(PipelineState& st, const PipelineConfig& cfg) {
    if (cfg.points.empty())
        throw SchemaError("stage solve-points requires at least one base point");
    std::vector<PointSolve> sols(cfg.points.size());
    int jobs = std::max(1, cfg.jobs);
    if (jobs == 1) {
        sols = solve_at_base_points(*st.adm, *st.data, cfg.points, cfg.K);
    } else {
        std::vector<std::thread> pool;
        std::exception_ptr fail;
        std::mutex mu;
        std::atomic<size_t> next{0};
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&] {
                for (size_t i = next++; i < cfg.points.size(); i = next++) {
                    try {
                        sols[i] = solve_at_base_points(*st.adm, *st.data,
                                                       {cfg.points[i]}, cfg.K)[0];
                    } catch (...) {
                        std::lock_guard<std::mutex> lk(mu);
                        if (!fail) fail = std::current_exception();
                    }
                }
            });
        for (auto& t : pool) t.join();
        if (fail) std::rethrow_exception(fail);
    }
    json pts = json::array();
    json comps = json::array();
    bool pass = true;
    for (auto& s : sols) {
        bool ok = s.max_residual <= 1e-9;
        pass = pass && ok;
        pts.push_back(
            {{"point", s.point}, {"max_residual", s.max_residual}, {"pass", ok}});
        json cj = json::array();
        for (auto& c : s.u.comp) cj.push_back(jet_to_json(c));
        comps.push_back({{"point", s.point}, {"components", cj}});
    }
    st.report["stages"]["solve-points"] = {{"points", pts}, {"pass", pass}};
    st.embedding["point_solves"] = comps;
    st.all_pass = st.all_pass && pass;
}

void stage_characteristics(PipelineState& st, const PipelineConfig& cfg,
                           const std::filesystem::path& out) {
    json r;
    int n = st.input.n;
    if (st.input.symbol) {
        st.sym = PrincipalSymbol::scalar_symbol(*st.input.symbol, n);
        if (!st.input.surface)
            throw SchemaError("scalar symbol input requires a \"surface\"");
        st.surface = st.input.surface;
        r["kind"] = "scalar";
    } else {
        st.sym = PrincipalSymbol::system_symbol(*st.data);
        st.surface = Jet::variable(n - 1, n, st.input.K, st.data->u0[0].mode());
        r["kind"] = "system";
    }
    st.vertex.assign(n, 0.0);
    std::vector<Scalar> origin(n, Scalar::zero(st.sym->mode()));

    auto cls = is_characteristic(*st.sym, origin, *st.surface);
    r["characteristic_at_origin"] = {{"characteristic", cls.characteristic},
                                     {"value", scalar_to_json(cls.value)},
                                     {"tolerance", cls.tolerance}};
    if (cls.characteristic) {
        auto cert = is_nonexceptional(*st.sym, origin, *st.surface);
        json dir = json::array();
        for (auto& c : cert.witness_direction) dir.push_back(scalar_to_json(c));
        r["nonexceptional"] = {{"nonexceptional", cert.nonexceptional},
                               {"inconclusive", cert.inconclusive},
                               {"witness", cert.witness},
                               {"witness_direction", dir},
                               {"value", scalar_to_json(cert.value)}};
    }
    if (st.sym->kind == PrincipalSymbol::Kind::scalar && st.sym->m >= 1) {
        UniformizationMap map = solve_hj_series(*st.sym, *st.surface, st.input.K);
        map.trust_radius = cfg.trust_radius;
        Jet residual = map.dxi_dt + st.sym->det_on_jets([&] {
            std::vector<Jet> pj;
            for (int i = 0; i < n; ++i) pj.push_back(differentiate(map.xi, i));
            return pj;
        }());
        r["hj"] = {{"xi", jet_to_json(map.xi)},
                   {"dxi_dt", jet_to_json(map.dxi_dt)},
                   {"residual_max_abs", residual.max_abs_coeff()},
                   {"pass", residual.is_zero()}};
        st.all_pass = st.all_pass && residual.is_zero();
    }
    CharStrip strip =
        hamilton_flow(*st.sym, st.vertex, *st.surface, 0.0, 1.0, cfg.step);
    r["strip"] = {{"g0", strip.g0},
                  {"max_drift", strip.max_drift},
                  {"zero_velocity", strip.zero_velocity},
                  {"samples", strip.t.size()}};
    std::ofstream csv(out / "strips.csv", std::ios::binary);
    write_strips_csv(csv, {strip});
    r["pass"] = strip.max_drift <= 1e-8;
    st.all_pass = st.all_pass && r["pass"].get<bool>();
    st.report["stages"]["characteristics"] = r;
}

void stage_conoid(PipelineState& st, const PipelineConfig& cfg,
                  const std::filesystem::path& out) {
    ConoidSample conoid =
        conoid_sample(*st.sym, st.vertex, *st.surface, 8, 0.0, 1.0, cfg.step);
    double max_drift = 0.0;
    size_t samples = 0;
    for (auto& s : conoid.strips) {
        max_drift = std::max(max_drift, s.max_drift);
        samples += s.t.size();
    }
    std::ofstream csv(out / "conoid.csv", std::ios::binary);
    write_strips_csv(csv, conoid.strips);
    json r = {{"strips", conoid.strips.size()},
              {"samples", samples},
              {"max_drift", max_drift},
              {"exceptional", conoid.exceptional},
              {"pass", max_drift <= 1e-8}};
    st.all_pass = st.all_pass && r["pass"].get<bool>();
    st.report["stages"]["conoid"] = r;
}

json error_json(const std::string& kind, const std::string& what) {
    return {{"error", kind}, {"message", what}};
}

} // namespace

int run_pipeline(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        PipelineState st;
        st.input = load_input(cfg);
        auto stages = canonical_stages(cfg.stages);
        check_dependencies(stages, st.input);
        if (st.input.metric) st.current = *st.input.metric;
        std::filesystem::path dir(cfg.out_dir);
        std::filesystem::create_directories(dir);

        st.report["summary"] = {
            {"n", st.input.n},
            {"K", st.input.K},
            {"mode", st.input.mode == Mode::exact ? "exact" : "float"},
            {"ambient_nonsingular", st.input.n * (st.input.n + 1) / 2},
            {"ambient_augmented",
             (st.input.n * st.input.n + 3 * st.input.n - 4) / 2}};

        for (const auto& s : stages) {
            if (s == "normal-form") stage_normal_form(st);
            else if (s == "admissibility") stage_admissibility(st);
            else if (s == "cartan-janet") stage_cartan_janet(st, cfg);
            else if (s == "singular-data") stage_singular_data(st, cfg);
            else if (s == "solve-points") stage_solve_points(st, cfg);
            else if (s == "characteristics") stage_characteristics(st, cfg, dir);
            else if (s == "conoid") stage_conoid(st, cfg, dir);
            if (s == "singular-data" && !st.adm)
                throw SchemaError("singular-data ran without admissible metric");
        }
        st.report["summary"]["pass"] = st.all_pass;
        write_file(dir / "report.json", st.report.dump(2) + "\n");
        if (!st.embedding.is_null())
            write_file(dir / "embedding.json", st.embedding.dump(2) + "\n");
        out << (st.all_pass ? "pass" : "fail") << "\n";
        return st.all_pass ? 0 : 1;
    } catch (const SchemaError& e) {
        err << error_json("schema", e.what()).dump() << "\n";
        return 2;
    } catch (const CharacteristicError& e) {
        json j = error_json("characteristic", e.what());
        j["leading_coefficient"] = e.leading_coefficient;
        err << j.dump() << "\n";
        return 3;
    } catch (const ContextError& e) {
        err << error_json("schema", e.what()).dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << error_json("internal", e.what()).dump() << "\n";
        return 1;
    }
}

int explain_pipeline(const PipelineConfig& cfg, std::ostream& out,
                     std::ostream& err) {
    try {
        PipelineInput input = load_input(cfg);
        auto stages = canonical_stages(cfg.stages);
        check_dependencies(stages, input);
        int n = input.n;
        int N = n * (n + 1) / 2;
        int D = (n * n + 3 * n - 4) / 2;
        std::map<std::string, std::string> what = {
            {"normal-form", "remove metric cross terms by a shear diffeomorphism"},
            {"admissibility",
             "check the singular normal form g_nn = (|x'|^2 + x_n^2) F"},
            {"cartan-janet", "inductive isometric embedding into E^" +
                                 std::to_string(N)},
            {"singular-data", "characteristic Cauchy data in E^" +
                                  std::to_string(D) + " with Delta = x1 Delta0"},
            {"solve-points", "augmented-system solves at off-singularity points"},
            {"characteristics",
             "principal symbol, characteristic/non-exceptional certificates"},
            {"conoid", "bicharacteristic conoid sampling from the vertex"}};
        if (stages.empty()) out << "plan: no stages requested (no-op)\n";
        for (const auto& s : stages)
            out << "plan: " << s << " -> " << what[s] << "\n";
        out << "dimensions: n=" << n << " N=" << N << " N+n-2=" << D
            << " K=" << input.K << "\n";
        return 0;
    } catch (const SchemaError& e) {
        err << error_json("schema", e.what()).dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << error_json("internal", e.what()).dump() << "\n";
        return 1;
    }
}

} // namespace embjet

#include "plab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "plab/errors.hpp"
#include "plab/exponents.hpp"
#include "plab/polyroots.hpp"
#include "plab/verify.hpp"

#ifndef PLAB_VERSION
#define PLAB_VERSION "0.0.0"
#endif

namespace plab {

namespace {

using nlohmann::json;

const std::set<std::string> kMethods{"series", "log-image", "two-sided", "bracket", "polyroots", "verify"};

std::string point_label(const ParamMap& p)
{
    std::string s;
    for (const auto& [k, v] : p)
        s += (s.empty() ? "" : ";") + k + "=" + fmt(v);
    return s;
}

/// Swept coordinate for plots: H when present, else the first parameter.
double point_x(const ParamMap& p, std::size_t index)
{
    if (auto it = p.find("H"); it != p.end())
        return it->second;
    if (!p.empty())
        return p.begin()->second;
    return static_cast<double>(index);
}

FitModel parse_model(const std::string& m)
{
    if (m == "exponential")
        return FitModel::Exponential;
    if (m == "powerlaw")
        return FitModel::PowerLaw;
    if (m == "eq12")
        return FitModel::Eq12;
    throw DomainError("unknown fit model '" + m + "'");
}

std::vector<double> point_ladder(const ExperimentConfig& c, const ParamMap& p)
{
    if (c.ladder_rule.empty())
        return c.horizons;
    if (c.ladder_rule != "hypothesis-window")
        throw DomainError("unknown ladder rule '" + c.ladder_rule + "'");
    // Survival between 1e-2 and 1e-3 under the hypothesis rate H(1 - H).
    const auto it = p.find("H");
    if (it == p.end())
        throw DomainError("hypothesis-window ladder needs parameter H");
    const double rate = it->second * (1.0 - it->second);
    const double lo = std::log(100.0) / rate, hi = std::log(1000.0) / rate;
    std::vector<double> out;
    for (int k = 0; k <= 12; ++k)
    {
        const double t = std::round((lo + (hi - lo) * k / 12.0) / c.step) * c.step;
        out.push_back(std::round(t * 1e9) / 1e9);
    }
    return out;
}

std::string csv_quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char ch : s)
        q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key)
{
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    return j.at(key).get<double>();
}

struct Writer
{
    std::filesystem::path dir;
    ResultManifest& manifest;

    void put(const std::string& name, const std::string& bytes)
    {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write " + (dir / name).string());
        f << bytes;
        manifest.outputs.push_back({name, sha256_hex(bytes), bytes.size()});
    }
};

void write_manifest(const std::filesystem::path& dir, const ResultManifest& m)
{
    std::ofstream f(dir / "manifest.json");
    f << std::setw(2) << m.to_json() << '\n';
}

std::string gnuplot_script(const ExperimentConfig& c, bool hurst_axis, const std::vector<std::string>& curves)
{
    std::ostringstream g;
    g << "# " << c.experiment << "\n"
      << "set datafile separator ','\n"
      << "set terminal pngcairo size 900,600\n";
    if (hurst_axis && c.method != "verify")
    {
        g << "set output 'estimates.png'\n"
          << "set key top left\nset xlabel 'H'\nset ylabel 'rate'\nset xrange [0:1]\n"
          << "plot ";
        bool first = true;
        auto sep = [&] {
            if (!first)
                g << ", \\\n     ";
            first = false;
        };
        for (const auto& name : curves)
        {
            sep();
            if (name == "prop1" || name == "prop1b" || name == "eq21" || name == "prop4")
                g << "'atlas_" << name << ".csv' skip 1 using 2:4:5 with filledcurves fs transparent solid 0.25 title '"
                  << name << "'";
            else
                g << "'atlas_" << name << ".csv' skip 1 using 2:($6 == $6 ? $6 : $5) with lines title '" << name << "'";
        }
        sep();
        g << "'estimates.csv' skip 1 using 3:4:5 with yerrorbars pt 7 title 'estimates'\n";
    }
    if (c.method != "verify" && c.method != "bracket")
    {
        g << "set output 'series.png'\n"
          << "set key off\nset xlabel '" << (c.method == "log-image" || c.fit_model != "powerlaw" ? "T" : "ln T")
          << "'\nset ylabel '-ln p'\n"
          << "plot 'series.csv' skip 1 using " << (c.fit_model == "powerlaw" ? "(log($3))" : "3")
          << ":(-$8):9 with yerrorbars pt 7\n";
    }
    return g.str();
}

}  // namespace

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream s;
    for (unsigned i = 0; i < len; ++i)
        s << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return s.str();
}

ExperimentConfig ExperimentConfig::from_json(const json& j)
{
    ExperimentConfig c;
    try
    {
        c.experiment = j.at("experiment").get<std::string>();
        c.method = j.value("method", c.method);
        c.kernel = j.value("kernel", c.kernel);
        if (j.contains("points"))
            c.points = j.at("points").get<std::vector<ParamMap>>();
        c.step = j.value("step", c.step);
        c.alpha = j.value("alpha", c.alpha);
        c.k = j.value("k", c.k);
        c.steps = j.value("steps", c.steps);
        c.horizons = j.value("horizons", c.horizons);
        c.ladder_rule = j.value("ladder_rule", c.ladder_rule);
        c.level = j.value("level", c.level);
        c.strict = j.value("strict", c.strict);
        c.n_paths = j.value("n_paths", c.n_paths);
        c.workers = j.value("workers", c.workers);
        c.seed = j.value("seed", c.seed);
        c.fit_model = j.value("fit_model", c.fit_model);
        c.min_horizon = opt_from(j, "min_horizon");
        c.compare = j.value("compare", c.compare);
        c.overlays = j.value("overlays", c.overlays);
        c.out_dir = j.value("out_dir", c.out_dir);
    }
    catch (const json::exception& e)
    {
        throw DomainError(std::string("config: ") + e.what());
    }
    if (c.experiment.empty())
        throw DomainError("config: empty experiment name");
    if (!kMethods.count(c.method))
        throw DomainError("config: unknown method '" + c.method + "'");
    if (c.points.empty())
        throw DomainError("config: no parameter points");
    if (c.method != "verify" && c.method != "polyroots" && c.kernel.empty())
        throw DomainError("config: method '" + c.method + "' needs a kernel");
    if (c.n_paths == 0 || c.workers == 0)
        throw DomainError("config: n_paths and workers must be positive");
    if (!(c.step > 0.0))
        throw DomainError("config: step must be positive");
    if (c.method == "bracket" && c.steps.empty())
        throw DomainError("config: bracket needs grid steps");
    if (c.method != "verify" && c.method != "bracket" && c.horizons.empty() && c.ladder_rule.empty())
        throw DomainError("config: empty horizon ladder");
    parse_model(c.fit_model);
    return c;
}

json ExperimentConfig::to_json() const
{
    json j{
        {"experiment", experiment}, {"method", method},   {"kernel", kernel},         {"points", points},
        {"step", step},             {"alpha", alpha},     {"k", k},                   {"steps", steps},
        {"horizons", horizons},     {"ladder_rule", ladder_rule}, {"level", level},   {"strict", strict},
        {"n_paths", n_paths},       {"workers", workers}, {"seed", seed},             {"fit_model", fit_model},
        {"min_horizon", opt_json(min_horizon)},           {"compare", compare},       {"overlays", overlays},
        {"out_dir", out_dir},
    };
    return j;
}

const std::vector<std::string>& builtin_names()
{
    static const std::vector<std::string> names{"figure1", "sinai",   "fbm-sweep", "slepian-bracket", "khanin",
                                                "prop5",   "laplace", "polyroots", "verify-all"};
    return names;
}

ExperimentConfig builtin_config(const std::string& name)
{
    static const std::map<std::string, const char*> configs = {
        {"figure1", R"({
  "experiment": "figure1", "method": "series", "kernel": "dual-ifbm",
  "points": [{"H":0.1},{"H":0.2},{"H":0.3},{"H":0.4},{"H":0.5},{"H":0.6},{"H":0.7},{"H":0.8},{"H":0.9}],
  "step": 0.05, "ladder_rule": "hypothesis-window", "n_paths": 1000000, "seed": 20260104,
  "fit_model": "exponential", "compare": "prop1", "overlays": ["hypothesis"], "out_dir": "out/figure1"})"},
        {"sinai", R"({
  "experiment": "sinai", "method": "series", "kernel": "dual-ibm-scaled", "points": [{"p":1}],
  "step": 0.05, "horizons": [5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23,24,25],
  "n_paths": 10000000, "seed": 20260102, "fit_model": "exponential", "compare": "eq3", "out_dir": "out/sinai"})"},
        {"fbm-sweep", R"({
  "experiment": "fbm-sweep", "method": "log-image", "kernel": "dual-fbm",
  "points": [{"H":0.25},{"H":0.5},{"H":0.75}], "step": 1,
  "horizons": [2.772588722239781, 3.1191623125197538, 3.4657359027997265, 3.8123094930796992,
               4.1588830833596715, 4.5054566736396442, 4.852030263919617, 5.1986038541995897,
               5.5451774444795625, 5.8917510347595352, 6.2383246250395079, 6.5848982153194806,
               6.9314718055994531, 7.2780453958794258, 7.6246189861593985, 7.9711925764393712,
               8.317766166719343],
  "n_paths": 1000000, "seed": 20260103, "fit_model": "exponential", "min_horizon": 2.772588722239781,
  "compare": "eq2", "overlays": ["eq2"], "out_dir": "out/fbm-sweep"})"},
        {"slepian-bracket", R"({
  "experiment": "slepian-bracket", "method": "bracket", "kernel": "frac-slepian", "points": [{"H":0.5}],
  "k": 2, "steps": [0.015625, 0.0078125, 0.00390625], "n_paths": 2000000, "seed": 20260101,
  "compare": "eq20", "out_dir": "out/slepian-bracket"})"},
        {"khanin", R"({
  "experiment": "khanin", "method": "two-sided", "kernel": "chi", "points": [{"H":0.25},{"H":0.75}],
  "step": 0.25, "alpha": 1, "horizons": [4,8,16,32,64,128], "level": 1, "strict": true,
  "n_paths": 1000000, "seed": 20260109, "fit_model": "powerlaw", "min_horizon": 16,
  "compare": "prop4", "out_dir": "out/khanin"})"},
        {"prop5", R"({
  "experiment": "prop5", "method": "two-sided", "kernel": "fbm", "points": [{"H":0.5}],
  "step": 0.25, "alpha": 0.5, "horizons": [64,128,256,512,1024,2048,4096], "level": 1, "strict": true,
  "n_paths": 1000000, "seed": 20260108, "fit_model": "powerlaw", "min_horizon": 64,
  "compare": "prop5", "out_dir": "out/prop5"})"},
        {"laplace", R"({
  "experiment": "laplace", "method": "series", "kernel": "laplace-dual", "points": [{}],
  "step": 0.05, "horizons": [5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,21,22,23,24,25],
  "n_paths": 1000000, "seed": 20260107, "fit_model": "exponential", "compare": "prop2", "out_dir": "out/laplace"})"},
        {"polyroots", R"({
  "experiment": "polyroots", "method": "polyroots", "points": [{}], "horizons": [8,16,32,64,128],
  "n_paths": 100000, "seed": 20260107, "fit_model": "powerlaw", "min_horizon": 8, "out_dir": "out/polyroots"})"},
        {"verify-all", R"({
  "experiment": "verify-all", "method": "verify", "step": 0.005,
  "points": [{"relation":7},{"relation":9},{"relation":10},{"relation":13,"p":1},
             {"relation":14,"p":1.7320508075688772},{"relation":14,"p":2},
             {"relation":24,"H":0.01},{"relation":24,"H":0.03},{"relation":24,"H":0.06}],
  "out_dir": "out/verify-all"})"},
    };
    const auto it = configs.find(name);
    if (it == configs.end())
        throw DomainError("unknown built-in experiment '" + name + "'");
    return ExperimentConfig::from_json(json::parse(it->second));
}

json ResultManifest::to_json() const
{
    json outs = json::array();
    for (const auto& o : outputs)
        outs.push_back({{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
    return json{
        {"config", config},   {"tool_version", tool_version}, {"status", status},
        {"failed_stage", failed_stage}, {"outputs", outs},    {"warnings", warnings},
        {"results", results}, {"wall_seconds", wall_seconds}, {"violation", violation},
    };
}

ResultManifest ResultManifest::from_json(const json& j)
{
    ResultManifest m;
    try
    {
        m.config = j.at("config");
        m.tool_version = j.at("tool_version").get<std::string>();
        m.status = j.at("status").get<std::string>();
        m.failed_stage = j.value("failed_stage", std::string());
        for (const auto& o : j.at("outputs"))
            m.outputs.push_back(
                {o.at("path").get<std::string>(), o.at("sha256").get<std::string>(), o.at("bytes").get<std::size_t>()});
        m.warnings = j.at("warnings").get<std::vector<std::string>>();
        m.results = j.at("results");
        m.wall_seconds = j.value("wall_seconds", 0.0);
        m.violation = j.value("violation", false);
    }
    catch (const json::exception& e)
    {
        throw DomainError(std::string("manifest: ") + e.what());
    }
    return m;
}

ResultManifest load_manifest(const std::filesystem::path& dir)
{
    const auto path = std::filesystem::is_directory(dir) ? dir / "manifest.json" : dir;
    std::ifstream f(path);
    if (!f)
        throw DomainError("cannot read " + path.string());
    json j;
    try
    {
        f >> j;
    }
    catch (const json::exception& e)
    {
        throw DomainError(path.string() + ": " + e.what());
    }
    return ResultManifest::from_json(j);
}

ResultManifest run_experiment(const ExperimentConfig& c)
{
    const auto t0 = std::chrono::steady_clock::now();
    ResultManifest m;
    m.config = c.to_json();
    m.tool_version = std::string("plab ") + PLAB_VERSION;
    const std::filesystem::path dir(c.out_dir);
    std::string stage = "setup";

    std::ostringstream series_csv, estimates_csv;
    json certificates = json::array();
    series_csv << "family,params,T,step,n_paths,p_hat,se,log_p,log_p_se,flags\n";
    estimates_csv << "experiment,point,x,estimate,se,model,window_lo,window_hi,atlas,lower,upper,inside,flags\n";
    bool hurst_axis = true;

    try
    {
        std::filesystem::create_directories(dir);
        const BarrierSpec barrier{c.level, c.strict ? Comparison::StrictBelow : Comparison::NonstrictBelow};
        const McBudget budget{c.n_paths, c.workers, 0};

        for (std::size_t i = 0; i < c.points.size(); ++i)
        {
            const ParamMap& p = c.points[i];
            const std::string label = point_label(p);
            hurst_axis = hurst_axis && p.count("H");
            json row{{"experiment", c.experiment}, {"point", label}, {"x", point_x(p, i)}};
            std::vector<std::string> flags;

            if (c.method == "verify")
            {
                stage = "verify";
                ParamMap rp = p;
                const auto rel = rp.find("relation");
                if (rel == rp.end())
                    throw DomainError("verify point without 'relation'");
                const int relation = static_cast<int>(rel->second);
                rp.erase(rel);
                const auto r = verify_relation(relation, rp, VerifyOptions{c.step, c.workers});
                certificates.push_back(plab::to_json(r));
                const bool violated = r.verdict == Verdict::Violated || !r.agree;
                row.update({{"kind", "certificate"}, {"estimate", r.direct.worst_gap}, {"se", 0.0},
                            {"model", std::string(to_string(r.verdict))}, {"window_lo", nullptr},
                            {"window_hi", nullptr}, {"atlas", ""}, {"lower", nullptr}, {"upper", nullptr},
                            {"inside", r.verdict == Verdict::CertifiedHeuristic}});
                flags.push_back(std::string(to_string(r.verdict)));
                if (!r.agree)
                    flags.push_back("disagree");
                if (!r.note.empty())
                    m.warnings.push_back("rel" + std::to_string(relation) + " " + label + ": " + r.note);
                m.violation = m.violation || violated;
                row["flags"] = flags;
                m.results.push_back(row);
                continue;
            }

            stage = "simulate";
            const RngStreamSpec stream{c.seed, 100 * i};
            std::vector<SurvivalEstimate> series;
            std::optional<Bracket> bracket;
            if (c.method == "bracket")
            {
                const auto spec = KernelSpec::parse(c.kernel, p);
                if (!spec.family())
                    throw DomainError("bracket needs a stationary family");
                bracket = lishao_bracket(*spec.family(), c.k, c.level, c.steps, budget, stream);
                series = bracket->estimates;
            }
            else if (c.method == "polyroots")
            {
                for (double deg : c.horizons)
                {
                    const int n = static_cast<int>(std::lround(deg / 2));
                    if (n < 1 || 2.0 * n != deg)
                        throw DomainError("polyroots horizons must be even degrees");
                    auto r = random_poly_no_zero_prob(
                        n, budget, RngStreamSpec{c.seed, 100 * i + static_cast<std::uint64_t>(deg)});
                    r.estimate.horizon = deg;
                    if (r.rejected)
                        m.warnings.push_back("degree " + fmt(deg) + ": " + std::to_string(r.rejected)
                                             + " rejected samples");
                    series.push_back(r.estimate);
                }
            }
            else
            {
                const auto spec = KernelSpec::parse(c.kernel, p);
                const auto ladder = point_ladder(c, p);
                SurvivalPlan plan = c.method == "log-image" ? log_image_plan(spec, c.step, ladder)
                                    : c.method == "two-sided" ? two_sided_plan(spec, c.step, c.alpha, ladder)
                                                              : one_sided_plan(spec, c.step, ladder);
                series = run_survival(plan, barrier, budget, stream);
            }
            for (const auto& e : series)
                for (const auto& f : e.flags)
                    flags.push_back(f + "@T=" + fmt(e.horizon));
            write_series_csv(series_csv, c.kernel.empty() ? c.method : c.kernel, label, series, false);

            stage = "fit";
            double estimate, se;
            std::string model;
            json wlo = nullptr, whi = nullptr;
            if (bracket)
            {
                estimate = bracket->upper;
                se = bracket->upper_se;
                model = "bracket";
                row["bracket_lower"] = bracket->lower;
                row["p0"] = bracket->p;
                row["p0_se"] = bracket->p_se;
            }
            else
            {
                FitOptions fo;
                fo.min_horizon = c.min_horizon;
                if (!c.ladder_rule.empty())
                    fo.min_horizon = point_ladder(c, p).front();
                const auto fm = parse_model(c.fit_model);
                const auto f = fm == FitModel::PowerLaw ? fit_powerlaw(series, fo)
                                                        : fit_dual_exponential(series, fm, fo);
                estimate = f.theta_hat;
                se = f.se;
                model = c.fit_model;
                wlo = f.window_lo;
                whi = f.window_hi;
                if (f.alpha_hat)
                    row["alpha_hat"] = *f.alpha_hat;
            }

            stage = "compare";
            row.update({{"kind", "estimate"}, {"estimate", estimate}, {"se", se}, {"model", model},
                        {"window_lo", wlo}, {"window_hi", whi}, {"atlas", c.compare}});
            if (!c.compare.empty())
            {
                const auto hit = p.find("H");
                const double h = hit == p.end() ? 0.5 : hit->second;
                const auto a = bounds_atlas(c.compare, h, c.compare == "prop5" ? std::optional(c.alpha) : std::nullopt);
                std::optional<double> lo = a.exact ? a.exact : a.lower;
                std::optional<double> hi = a.exact ? a.exact : a.upper;
                row["lower"] = opt_json(lo);
                row["upper"] = opt_json(hi);
                if (a.applicable)
                {
                    const bool inside = a.contains(estimate, 2.0 * se);
                    row["inside"] = inside;
                    if (!inside)
                    {
                        flags.push_back("outside-bounds");
                        m.violation = true;
                    }
                }
                else
                    row["inside"] = nullptr;
                if (!a.note.empty())
                    flags.push_back(a.note);
            }
            else
                row.update({{"lower", nullptr}, {"upper", nullptr}, {"inside", nullptr}});
            row["flags"] = flags;
            m.results.push_back(row);
        }

        stage = "write";
        auto cell = [](const json& v) {
            if (v.is_null())
                return std::string();
            if (v.is_boolean())
                return std::string(v.get<bool>() ? "1" : "0");
            if (v.is_number())
                return fmt(v.get<double>());
            return v.get<std::string>();
        };
        for (const auto& r : m.results)
        {
            std::string flags;
            for (const auto& f : r.at("flags"))
                flags += (flags.empty() ? "" : ";") + f.get<std::string>();
            estimates_csv << cell(r.at("experiment")) << ',' << cell(r.at("point")) << ',' << cell(r.at("x")) << ','
                          << cell(r.at("estimate")) << ',' << cell(r.at("se")) << ',' << cell(r.at("model")) << ','
                          << cell(r.at("window_lo")) << ',' << cell(r.at("window_hi")) << ',' << cell(r.at("atlas"))
                          << ',' << cell(r.at("lower")) << ',' << cell(r.at("upper")) << ',' << cell(r.at("inside"))
                          << ',' << csv_quote(flags) << '\n';
        }
        Writer w{dir, m};
        w.put("estimates.csv", estimates_csv.str());
        if (c.method == "verify")
        {
            std::ostringstream s;
            s << std::setw(2) << certificates << '\n';
            w.put("certificates.json", s.str());
        }
        else
            w.put("series.csv", series_csv.str());

        std::vector<std::string> curves;
        if (!c.compare.empty())
            curves.push_back(c.compare);
        for (const auto& o : c.overlays)
            if (std::find(curves.begin(), curves.end(), o) == curves.end())
                curves.push_back(o);
        if (hurst_axis && c.method != "verify")
        {
            std::vector<double> hs;
            for (int k = 1; k <= 99; ++k)
                hs.push_back(k / 100.0);
            for (const auto& name : curves)
            {
                std::ostringstream s;
                write_atlas_csv(s, {name}, hs, name == "prop5" ? std::optional(c.alpha) : std::nullopt);
                w.put("atlas_" + name + ".csv", s.str());
            }
        }
        w.put("plot.gp", gnuplot_script(c, hurst_axis, curves));
    }
    catch (const std::exception& e)
    {
        m.status = "failed";
        m.failed_stage = stage;
        m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::error_code ec;
        if (std::filesystem::is_directory(dir, ec))
            write_manifest(dir, m);
        throw ExperimentError(stage, e.what(), m);
    }
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(dir, m);
    return m;
}

std::vector<ReportRow> emit_report(const std::vector<ResultManifest>& manifests)
{
    std::vector<ReportRow> rows;
    std::string kind;
    std::string kind_source;
    for (const auto& m : manifests)
    {
        const std::string name = m.config.value("experiment", std::string("?"));
        if (m.status != "ok")
            throw DomainError("manifest '" + name + "' is incomplete (failed at " + m.failed_stage + ")");
        std::string source;
        for (const auto& o : m.outputs)
            if (o.path == "estimates.csv")
                source = o.sha256;
        for (const auto& r : m.results)
        {
            const std::string k = r.value("kind", std::string("estimate"));
            if (kind.empty())
            {
                kind = k;
                kind_source = name;
            }
            else if (k != kind)
                throw DomainError("report mismatch: '" + name + "' has " + k + " results but '" + kind_source
                                  + "' has " + kind + " results");
            ReportRow row;
            row.experiment = r.at("experiment").get<std::string>();
            row.point = r.at("point").get<std::string>();
            row.estimate = r.at("estimate").get<double>();
            row.se = r.at("se").get<double>();
            row.lower = opt_from(r, "lower");
            row.upper = opt_from(r, "upper");
            if (r.contains("inside") && !r.at("inside").is_null())
                row.inside = r.at("inside").get<bool>();
            std::vector<std::string> flags = r.at("flags").get<std::vector<std::string>>();
            flags.insert(flags.end(), m.warnings.begin(), m.warnings.end());
            for (const auto& f : flags)
                row.flags += (row.flags.empty() ? "" : "|") + f;
            row.source_hash = source;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows)
{
    auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
    const auto quote = csv_quote;
    out << "experiment,point,estimate,se,atlas_lower,atlas_upper,inside_bounds,flags,source_sha256\n";
    for (const auto& r : rows)
        out << quote(r.experiment) << ',' << quote(r.point) << ',' << fmt(r.estimate) << ',' << fmt(r.se) << ','
            << opt(r.lower) << ',' << opt(r.upper) << ',' << (r.inside ? (*r.inside ? "true" : "false") : "") << ','
            << quote(r.flags) << ',' << r.source_hash << '\n';
}

}  // namespace plab

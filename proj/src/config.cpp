#include "opinion/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 0
#include <toml++/toml.hpp>

#include "opinion/format.hpp"

namespace opinion {

namespace {

std::string join(std::vector<std::string> const& items, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i)
    {
        if (i)
            out += sep;
        out += items[i];
    }
    return out;
}

//---------------------------------------------------------------------------//
// "name(arg, arg)" specs for kernels, diffusion shapes and initial laws
//---------------------------------------------------------------------------//

struct Call
{
    std::string name;
    std::vector<double> args;
};

std::optional<Call> parse_call(std::string const& text)
{
    static std::regex const pattern(R"(^\s*([a-z_]+)\s*(?:\(([^()]*)\))?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, pattern))
        return std::nullopt;
    Call call{m[1].str(), {}};
    if (!m[2].matched)
        return call;
    std::stringstream ss(m[2].str());
    std::string item;
    while (std::getline(ss, item, ','))
    {
        std::istringstream is(item);
        is.imbue(std::locale::classic());
        double v = 0.0;
        if (!(is >> v))
            return std::nullopt;
        is >> std::ws;
        if (!is.eof())
            return std::nullopt;
        call.args.push_back(v);
    }
    return call;
}

CompromiseKernel kernel_from(Call const& c)
{
    if (c.name == "constant" && c.args.size() == 1)
        return CompromiseKernel::constant(c.args[0]);
    if (c.name == "bounded_confidence" && c.args.size() == 1)
        return CompromiseKernel::bounded_confidence(c.args[0]);
    throw std::invalid_argument("expected constant(level) or bounded_confidence(threshold)");
}

DiffusionShape diffusion_from(Call const& c)
{
    if (c.name == "none" && c.args.empty())
        return DiffusionShape::none();
    if (c.name == "quadratic_cap" && c.args.empty())
        return DiffusionShape::quadratic_cap();
    if (c.name == "constant" && c.args.size() == 1)
        return DiffusionShape::constant(c.args[0]);
    throw std::invalid_argument("expected none, quadratic_cap or constant(level)");
}

InitialLaw initial_from(Call const& c)
{
    if (c.name == "uniform" && c.args.size() == 2)
        return InitialLaw::uniform(c.args[0], c.args[1]);
    if (c.name == "normal" && c.args.size() == 2)
        return InitialLaw::normal(c.args[0], c.args[1]);
    if (c.name == "gamma" && c.args.size() == 2)
        return InitialLaw::gamma(c.args[0], c.args[1]);
    if (c.name == "point" && c.args.size() == 1)
        return InitialLaw::point(c.args[0]);
    throw std::invalid_argument("expected uniform(lo, hi), normal(mean, variance), gamma(shape, scale) or point(x)");
}

//---------------------------------------------------------------------------//
// Reads one TOML table, remembering which keys were consumed
//---------------------------------------------------------------------------//

class TableReader
{
  public:
    TableReader(toml::table const* table, std::string prefix, std::vector<std::string>& issues)
        : table_(table), prefix_(std::move(prefix)), issues_(issues)
    {
    }

    std::string key_name(std::string_view key) const { return prefix_ + "." + std::string(key); }

    void issue(std::string_view key, std::string_view what) { issues_.push_back(key_name(key) + ": " + std::string(what)); }

    bool has(std::string_view key) const { return table_ && table_->contains(key); }

    toml::node const* node(std::string_view key)
    {
        seen_.insert(std::string(key));
        return table_ ? table_->get(key) : nullptr;
    }

    std::optional<double> real(std::string_view key)
    {
        auto const* n = node(key);
        if (!n)
            return std::nullopt;
        if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer()))
        {
            if (!std::isfinite(*v))
            {
                issue(key, "must be finite");
                return std::nullopt;
            }
            return v;
        }
        issue(key, "must be a number");
        return std::nullopt;
    }

    // Checks `ok` on the value; records `constraint` otherwise.
    template<class Pred>
    void real(std::string_view key, double& out, Pred ok, std::string_view constraint, bool required = false)
    {
        auto v = real(key);
        if (!v)
        {
            if (required && !has(key))
                issue(key, "required");
            return;
        }
        if (!ok(*v))
            issue(key, constraint);
        else
            out = *v;
    }

    std::optional<std::int64_t> integer(std::string_view key)
    {
        auto const* n = node(key);
        if (!n)
            return std::nullopt;
        if (!n->is_integer())
        {
            issue(key, "must be an integer");
            return std::nullopt;
        }
        return n->value<std::int64_t>();
    }

    void count(std::string_view key, std::size_t& out, std::int64_t min, bool required = false)
    {
        auto v = integer(key);
        if (!v)
        {
            if (required && !has(key))
                issue(key, "required");
            return;
        }
        if (*v < min)
            issue(key, "must be >= " + std::to_string(min));
        else
            out = static_cast<std::size_t>(*v);
    }

    std::optional<Call> call(std::string_view key)
    {
        auto const* n = node(key);
        if (!n)
            return std::nullopt;
        auto s = n->value<std::string>();
        if (!s)
        {
            issue(key, "must be a string");
            return std::nullopt;
        }
        auto c = parse_call(*s);
        if (!c)
            issue(key, "cannot parse '" + *s + "'");
        return c;
    }

    template<class T, class Make>
    void spec(std::string_view key, T& out, Make make)
    {
        auto c = call(key);
        if (!c)
            return;
        try
        {
            out = make(*c);
        }
        catch (std::invalid_argument const& e)
        {
            issue(key, e.what());
        }
    }

    std::optional<std::vector<double>> reals(std::string_view key)
    {
        auto const* n = node(key);
        if (!n)
            return std::nullopt;
        auto const* arr = n->as_array();
        if (!arr)
        {
            issue(key, "must be an array of numbers");
            return std::nullopt;
        }
        std::vector<double> out;
        for (auto const& item : *arr)
        {
            auto v = item.value<double>();
            if (!v || !(item.is_floating_point() || item.is_integer()))
            {
                issue(key, "must be an array of numbers");
                return std::nullopt;
            }
            out.push_back(*v);
        }
        return out;
    }

    void finish()
    {
        if (!table_)
            return;
        for (auto const& [k, v] : *table_)
        {
            if (!seen_.count(std::string(k.str())))
                issue(k.str(), "unknown key");
        }
    }

  private:
    toml::table const* table_;
    std::string prefix_;
    std::vector<std::string>& issues_;
    std::set<std::string> seen_;
};

auto positive = [](double v) { return v > 0.0; };
auto nonnegative = [](double v) { return v >= 0.0; };
auto unit_interval = [](double v) { return v >= 0.0 && v <= 1.0; };
auto opinion_range = [](double v) { return in_interval(v); };

void read_simulation(TableReader r, SimulationSection& s)
{
    r.real("epsilon", s.epsilon, positive, "must be > 0");
    if (auto v = r.real("nu"))
    {
        if (*v > 0.0)
            s.nu = *v;
        else
            r.issue("nu", "must be > 0");
    }
    if (auto v = r.real("kappa"))
    {
        if (*v > 0.0)
            s.kappa = *v;
        else
            r.issue("kappa", "must be > 0");
    }
    if (r.has("nu") == r.has("kappa"))
        r.issue("nu", "exactly one of nu or kappa must be given");
    r.real("horizon", s.horizon, nonnegative, "must be >= 0");

    if (auto v = r.integer("seed"))
    {
        if (*v < 0)
            r.issue("seed", "must be >= 0");
        else
            s.seed = static_cast<std::uint64_t>(*v);
    }
    else if (!r.has("seed"))
    {
        r.issue("seed", "required (runs are never seeded from the clock)");
    }
    r.count("replicas", s.replicas, 1);
    r.spec("fl_diffusion", s.fl_diffusion, diffusion_from);
    r.real("fl_noise_variance", s.fl_noise_variance, nonnegative, "must be >= 0");
    r.spec("ll_diffusion", s.ll_diffusion, diffusion_from);
    r.real("ll_noise_variance", s.ll_noise_variance, nonnegative, "must be >= 0");
    r.finish();
}

void read_followers(TableReader r, FollowerSection& f)
{
    r.count("count", f.count, 1);
    r.real("c_f", f.c_f, positive, "must be > 0");
    r.spec("kernel", f.kernel, kernel_from);
    r.spec("diffusion", f.diffusion, diffusion_from);
    r.real("noise_variance", f.noise_variance, nonnegative, "must be >= 0");
    r.spec("initial", f.initial, initial_from);
    r.finish();
}

void read_leader(TableReader r, LeaderSection& l)
{
    if (r.has("count"))
    {
        std::size_t n = 0;
        r.count("count", n, 1);
        if (n > 0)
            l.count = n;
    }
    r.real("mass", l.mass, [](double v) { return v > 0.0 && v <= 1.0; }, "must be in (0, 1]");
    r.real("c_fl_hat", l.c_fl_hat, positive, "must be > 0");
    r.real("c_l_hat", l.c_l_hat, positive, "must be > 0");
    r.real("psi", l.psi, unit_interval, "must be in [0, 1]");
    r.real("target", l.target, opinion_range, "must be in [-1, 1]");

    bool const has_delta = r.has("delta");
    bool const has_delta_bar = r.has("delta_bar");
    if (has_delta || has_delta_bar)
    {
        AdaptiveWindows w;
        r.real("delta", w.delta, unit_interval, "must be in [0, 1]", true);
        r.real("delta_bar", w.delta_bar, unit_interval, "must be in [0, 1]", true);
        l.adaptive = w;
    }
    r.spec("follower_kernel", l.follower_kernel, kernel_from);
    r.spec("leader_kernel", l.leader_kernel, kernel_from);
    r.spec("initial", l.initial, initial_from);
    r.finish();
}

void read_output(TableReader r, OutputSection& o)
{
    if (auto v = r.reals("checkpoints"))
        o.checkpoints = *v;
    r.count("bins", o.bins, 2);
    r.count("moments_stride", o.moments_stride, 1);
    r.real("oracle_tolerance", o.oracle_tolerance, positive, "must be > 0");
    r.finish();
}

//---------------------------------------------------------------------------//
// --override KEY=VALUE
//---------------------------------------------------------------------------//

toml::node_view<toml::node> value_holder(toml::table& scratch, std::string const& text)
{
    auto parsed = toml::parse("v = " + text);
    if (parsed)
        scratch = std::move(parsed).table();
    else
        scratch.insert_or_assign("v", text);  // bare words are strings
    return scratch["v"];
}

void apply_override(toml::table& root, std::string const& spec, std::vector<std::string>& issues)
{
    auto const eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
    {
        issues.push_back("override '" + spec + "': expected KEY=VALUE");
        return;
    }
    std::string const path = spec.substr(0, eq);
    std::string const text = spec.substr(eq + 1);

    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string part; std::getline(ss, part, '.');)
        parts.push_back(part);
    if (parts.size() < 2)
    {
        issues.push_back("override '" + path + "': expected section.key");
        return;
    }

    toml::table* table = &root;
    std::size_t i = 0;
    if (parts[0] == "leaders")
    {
        auto* arr = root["leaders"].as_array();
        std::size_t index = 0;
        bool const numeric = parts.size() == 3 && !parts[1].empty()
                             && parts[1].find_first_not_of("0123456789") == std::string::npos;
        if (numeric)
            index = std::stoul(parts[1]);
        if (!numeric || !arr || index < 1 || index > arr->size() || !(*arr)[index - 1].is_table())
        {
            issues.push_back("override '" + path + "': expected leaders.<1-based index>.key for an existing family");
            return;
        }
        table = (*arr)[index - 1].as_table();
        i = 2;
    }
    else
    {
        if (parts.size() != 2)
        {
            issues.push_back("override '" + path + "': expected section.key");
            return;
        }
        if (!root.contains(parts[0]))
            root.insert(parts[0], toml::table{});
        table = root[parts[0]].as_table();
        if (!table)
        {
            issues.push_back("override '" + path + "': '" + parts[0] + "' is not a section");
            return;
        }
        i = 1;
    }

    toml::table scratch;
    auto value = value_holder(scratch, text);
    table->insert_or_assign(parts[i], *value.node());
}

//---------------------------------------------------------------------------//

void check_model(ScenarioConfig const& cfg, std::vector<std::string>& issues)
{
    double total_mass = 0.0;
    bool derived_counts = false;
    for (auto const& l : cfg.leaders)
    {
        total_mass += l.mass;
        derived_counts = derived_counts || !l.count;
    }
    if (total_mass > 1.0)
        issues.push_back("leaders.mass: total leader mass must be <= 1");
    else if (derived_counts && !(total_mass < 1.0))
        issues.push_back("leaders.mass: total leader mass must be < 1 to derive leader counts");

    for (double c : cfg.output.checkpoints)
    {
        if (c < 0.0 || c > cfg.simulation.horizon)
            issues.push_back("output.checkpoints: " + format_real(c) + " outside [0, horizon]");
    }
    if (!issues.empty())
        return;

    auto const counts = resolved_leader_counts(cfg);
    for (std::size_t p = 0; p < counts.size(); ++p)
    {
        if (counts[p] == 0)
            issues.push_back("leaders." + std::to_string(p + 1) + ".mass: gives zero leaders for this follower count");
    }

    std::optional<Model> model;
    try
    {
        model = build_model(cfg);
    }
    catch (std::invalid_argument const& e)
    {
        issues.push_back(std::string("simulation: ") + e.what());
        return;
    }
    for (std::size_t p = 0; p < model->families.size(); ++p)
    {
        auto const cert = model->certificate(p);
        std::vector<std::string> failed;
        if (!cert.control_ok)
            failed.push_back("alpha r >= beta/2");
        if (!cert.leader_noise_ok)
            failed.push_back("leader noise support within the leader room");
        if (!cert.follower_leader_noise_ok)
            failed.push_back("follower-leader noise support within the follower room");
        if (!cert.follower_noise_ok)
            failed.push_back("follower-follower noise support within the follower room");
        if (!failed.empty())
            issues.push_back("leaders." + std::to_string(p + 1) + ": bound certificate fails (" + join(failed, "; ")
                             + ")");
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error("invalid config:\n  " + join(issues, "\n  ")), issues_(std::move(issues))
{
}

ScenarioConfig parse_config(std::string_view text, std::vector<std::string> const& overrides, std::string_view source)
{
    auto parsed = toml::parse(text, source);
    if (!parsed)
    {
        auto const& err = parsed.error();
        std::ostringstream msg;
        msg << source << ":" << err.source().begin.line << ":" << err.source().begin.column << ": "
            << err.description();
        throw ConfigError({msg.str()});
    }
    toml::table root = std::move(parsed).table();

    std::vector<std::string> issues;
    for (auto const& o : overrides)
        apply_override(root, o, issues);
    if (!issues.empty())
        throw ConfigError(issues);

    static std::set<std::string> const sections{"simulation", "followers", "leaders", "output"};
    for (auto const& [k, v] : root)
    {
        if (!sections.count(std::string(k.str())))
            issues.push_back(std::string(k.str()) + ": unknown section");
    }

    auto table_at = [&](std::string_view name) -> toml::table const* {
        auto const* n = root.get(name);
        if (n && !n->is_table())
        {
            issues.push_back(std::string(name) + ": must be a table");
            return nullptr;
        }
        return n ? n->as_table() : nullptr;
    };

    ScenarioConfig cfg;
    auto const* sim = table_at("simulation");
    if (!sim)
        issues.push_back("simulation: section required");
    read_simulation(TableReader(sim, "simulation", issues), cfg.simulation);
    read_followers(TableReader(table_at("followers"), "followers", issues), cfg.followers);

    if (auto const* n = root.get("leaders"))
    {
        auto const* arr = n->as_array();
        if (!arr || !arr->is_array_of_tables())
        {
            issues.push_back("leaders: must be an array of tables ([[leaders]])");
        }
        else
        {
            for (std::size_t p = 0; p < arr->size(); ++p)
            {
                LeaderSection l;
                read_leader(TableReader((*arr)[p].as_table(), "leaders." + std::to_string(p + 1), issues), l);
                cfg.leaders.push_back(l);
            }
        }
    }
    read_output(TableReader(table_at("output"), "output", issues), cfg.output);

    if (issues.empty())
        check_model(cfg, issues);
    if (!issues.empty())
        throw ConfigError(issues);
    return cfg;
}

ScenarioConfig load_config(std::filesystem::path const& path, std::vector<std::string> const& overrides)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), overrides, path.string());
}

std::string to_toml(ScenarioConfig const& cfg)
{
    std::ostringstream out;
    auto str = [](std::string const& s) { return "\"" + s + "\""; };

    auto const& s = cfg.simulation;
    out << "[simulation]\n";
    out << "epsilon = " << format_real(s.epsilon) << "\n";
    if (s.nu)
        out << "nu = " << format_real(*s.nu) << "\n";
    if (s.kappa)
        out << "kappa = " << format_real(*s.kappa) << "\n";
    out << "horizon = " << format_real(s.horizon) << "\n";
    out << "seed = " << s.seed << "\n";
    out << "replicas = " << s.replicas << "\n";
    out << "fl_diffusion = " << str(s.fl_diffusion.to_string()) << "\n";
    out << "fl_noise_variance = " << format_real(s.fl_noise_variance) << "\n";
    out << "ll_diffusion = " << str(s.ll_diffusion.to_string()) << "\n";
    out << "ll_noise_variance = " << format_real(s.ll_noise_variance) << "\n";

    auto const& f = cfg.followers;
    out << "\n[followers]\n";
    out << "count = " << f.count << "\n";
    out << "c_f = " << format_real(f.c_f) << "\n";
    out << "kernel = " << str(f.kernel.to_string()) << "\n";
    out << "diffusion = " << str(f.diffusion.to_string()) << "\n";
    out << "noise_variance = " << format_real(f.noise_variance) << "\n";
    out << "initial = " << str(f.initial.to_string()) << "\n";

    for (auto const& l : cfg.leaders)
    {
        out << "\n[[leaders]]\n";
        if (l.count)
            out << "count = " << *l.count << "\n";
        out << "mass = " << format_real(l.mass) << "\n";
        out << "c_fl_hat = " << format_real(l.c_fl_hat) << "\n";
        out << "c_l_hat = " << format_real(l.c_l_hat) << "\n";
        out << "psi = " << format_real(l.psi) << "\n";
        out << "target = " << format_real(l.target) << "\n";
        if (l.adaptive)
        {
            out << "delta = " << format_real(l.adaptive->delta) << "\n";
            out << "delta_bar = " << format_real(l.adaptive->delta_bar) << "\n";
        }
        out << "follower_kernel = " << str(l.follower_kernel.to_string()) << "\n";
        out << "leader_kernel = " << str(l.leader_kernel.to_string()) << "\n";
        out << "initial = " << str(l.initial.to_string()) << "\n";
    }

    auto const& o = cfg.output;
    out << "\n[output]\n";
    out << "checkpoints = [";
    for (std::size_t i = 0; i < o.checkpoints.size(); ++i)
        out << (i ? ", " : "") << format_real(o.checkpoints[i]);
    out << "]\n";
    out << "bins = " << o.bins << "\n";
    out << "moments_stride = " << o.moments_stride << "\n";
    out << "oracle_tolerance = " << format_real(o.oracle_tolerance) << "\n";
    return out.str();
}

//---------------------------------------------------------------------------//

ScaledParams scaled_params(ScenarioConfig const& cfg)
{
    ScaledInputs in;
    in.epsilon = cfg.simulation.epsilon;
    in.nu = cfg.simulation.nu;
    in.kappa = cfg.simulation.kappa;
    in.var_ff = cfg.followers.noise_variance;
    in.var_fl = cfg.simulation.fl_noise_variance;
    in.var_ll = cfg.simulation.ll_noise_variance;
    in.c_f = cfg.followers.c_f;
    for (auto const& l : cfg.leaders)
        in.families.push_back({l.c_fl_hat, l.c_l_hat, l.mass});
    return derive_scaled(in);
}

Model build_model(ScenarioConfig const& cfg)
{
    Model model{scaled_params(cfg),
                cfg.followers.kernel,
                cfg.followers.diffusion,
                cfg.simulation.fl_diffusion,
                cfg.simulation.ll_diffusion,
                {}};
    for (auto const& l : cfg.leaders)
        model.families.push_back({l.follower_kernel, l.leader_kernel});
    return model;
}

std::vector<std::size_t> resolved_leader_counts(ScenarioConfig const& cfg)
{
    std::vector<double> masses;
    bool any_derived = false;
    for (auto const& l : cfg.leaders)
    {
        masses.push_back(l.mass);
        any_derived = any_derived || !l.count;
    }
    std::vector<std::size_t> derived(cfg.leaders.size(), 0);
    if (any_derived)
        derived = leader_counts(cfg.followers.count, masses);
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < cfg.leaders.size(); ++p)
        out.push_back(cfg.leaders[p].count.value_or(derived[p]));
    return out;
}

OpinionEnsemble initial_ensemble(ScenarioConfig const& cfg, std::size_t replica)
{
    Rng rng = make_rng(cfg.simulation.seed, replica, RngStream::Initial);
    OpinionEnsemble ens;
    ens.followers = init_sampler(cfg.followers.initial, cfg.followers.count, rng);
    auto const counts = resolved_leader_counts(cfg);
    for (std::size_t p = 0; p < cfg.leaders.size(); ++p)
    {
        auto const& l = cfg.leaders[p];
        ens.families.push_back({init_sampler(l.initial, counts[p], rng), LeaderStrategy(l.psi, l.target, l.adaptive)});
    }
    return ens;
}

RunOptions run_options(ScenarioConfig const& cfg)
{
    RunOptions o;
    o.horizon = cfg.simulation.horizon;
    o.checkpoints = cfg.output.checkpoints;
    o.bins = cfg.output.bins;
    o.moments_stride = cfg.output.moments_stride;
    return o;
}

}  // namespace opinion

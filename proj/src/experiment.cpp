#include "hetnet/experiment.hpp"
#include "hetnet/mcoracle.hpp"
#include "hetnet/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace hetnet {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected)
{
    throw InvalidArgument(key + ": expected " + expected + ", got '" + value + "'");
}

bool parse_bool(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    bad_value(key, value, "a boolean");
}

std::string format_double(double x)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

template <typename T>
std::string join(const std::vector<T>& xs, const std::function<std::string(const T&)>& fmt)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + fmt(xs[i]);
    return out;
}

} // namespace

int parse_int_field(const std::string& key, const std::string& value)
{
    const std::string v = trim(value);
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, value, "an integer");
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        bad_value(key, value, "an integer in range");
    return static_cast<int>(x);
}

double parse_double_field(const std::string& key, const std::string& value)
{
    const std::string v = trim(value);
    if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        bad_value(key, value, "a number");
    }
    if (used != v.size()) bad_value(key, value, "a number");
    return x;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value)
{
    std::vector<int> out;
    for (const auto& item : split(value, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            out.push_back(parse_int_field(key, item));
            continue;
        }
        const int a = parse_int_field(key, item.substr(0, colon));
        const int b = parse_int_field(key, item.substr(colon + 1));
        if (b < a) bad_value(key, item, "a range A:B with A <= B");
        for (int x = a; x <= b; ++x) out.push_back(x);
    }
    if (out.empty()) bad_value(key, value, "a nonempty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value)
{
    std::vector<double> out;
    for (const auto& item : split(value, ',')) out.push_back(parse_double_field(key, item));
    if (out.empty()) bad_value(key, value, "a nonempty list");
    return out;
}

void ExperimentConfig::validate() const
{
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw InvalidArgument(std::string(field) + ": " + what);
    };
    require(!max_groups.empty(), "G", "sweep list must be nonempty");
    require(!gammas.empty(), "gamma", "sweep list must be nonempty");
    require(!num_small_cells.empty(), "N_f", "sweep list must be nonempty");
    require(!deployments.empty(), "deployment", "sweep list must be nonempty");
    require(!policies.empty(), "policy", "sweep list must be nonempty");
    for (int g : max_groups) require(g > 0, "G", "must be positive");
    for (double g : gammas) require(g >= 0, "gamma", "must be nonnegative");
    for (int nf : num_small_cells) {
        require(nf >= 0, "N_f", "must be nonnegative");
        require(nf <= params.num_groups, "N_f", "must not exceed N_u");
    }
    require(workers >= 0, "workers", "must be nonnegative");
    require(!out_dir.empty(), "out", "must be nonempty");
    SimParams p = params;
    p.max_groups = max_groups.front();
    p.gamma = gammas.front();
    p.num_small_cells = num_small_cells.front();
    p.validate();
}

ExperimentConfig parse_config(const std::string& text)
{
    ExperimentConfig c;
    SimParams& p = c.params;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    auto i = [](int& field) -> Setter { return [&field](auto& k, auto& v) { field = parse_int_field(k, v); }; };
    auto d = [](double& field) -> Setter { return [&field](auto& k, auto& v) { field = parse_double_field(k, v); }; };
    const std::map<std::string, Setter> setters{
        {"N_u", i(p.num_groups)},
        {"R_mc", d(p.cell_radius)},
        {"R_excl", d(p.exclusion_radius)},
        {"d_0", d(p.cutoff_distance)},
        {"alpha", d(p.pathloss_exponent)},
        {"w_db", d(p.wall_loss_db)},
        {"beta", d(p.loading)},
        {"M", i(p.macro_antennas)},
        {"L", i(p.small_cell_antennas)},
        {"R_u", d(p.scattering_radius)},
        {"cell_edge_snr_db", d(p.cell_edge_snr_db)},
        {"p1_over_p0_db", d(p.small_cell_power_offset_db)},
        {"epsilon1", d(p.eps1)},
        {"epsilon2", d(p.eps2)},
        {"slots_per_drop", i(p.slots_per_drop)},
        {"n_drops", i(p.num_drops)},
        {"rank_threshold", d(p.rank_threshold)},
        {"G", [&](auto& k, auto& v) { c.max_groups = parse_int_list(k, v); }},
        {"gamma", [&](auto& k, auto& v) { c.gammas = parse_double_list(k, v); }},
        {"N_f", [&](auto& k, auto& v) { c.num_small_cells = parse_int_list(k, v); }},
        {"deployment",
         [&](auto&, auto& v) {
             c.deployments.clear();
             for (const auto& item : split(v, ',')) c.deployments.push_back(parse_deployment(item));
         }},
        {"policy",
         [&](auto&, auto& v) {
             c.policies.clear();
             for (const auto& item : split(v, ',')) c.policies.push_back(parse_policy(item));
         }},
        {"seed",
         [&](auto& k, auto& v) {
             const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), c.seed);
             if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(k, v, "an unsigned 64-bit integer");
         }},
        {"out", [&](auto&, auto& v) { c.out_dir = v; }},
        {"ratecdf", [&](auto& k, auto& v) { c.write_rate_cdf = parse_bool(k, v); }},
        {"workers", i(c.workers)},
    };

    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(number) + ": ";
        if (eq == std::string::npos) throw InvalidArgument(where + "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) throw InvalidArgument(where + "unknown key '" + key + "'");
        try {
            it->second(key, value);
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(where + e.what());
        }
    }
    c.params.max_groups = c.max_groups.front();
    c.params.gamma = c.gammas.front();
    c.params.num_small_cells = c.num_small_cells.front();
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("config: cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string resolved_config(const ExperimentConfig& c)
{
    const SimParams& p = c.params;
    std::ostringstream os;
    auto put = [&](const char* key, const std::string& v) { os << key << " = " << v << '\n'; };
    put("N_u", std::to_string(p.num_groups));
    put("R_mc", format_double(p.cell_radius));
    put("R_excl", format_double(p.exclusion_radius));
    put("d_0", format_double(p.cutoff_distance));
    put("alpha", format_double(p.pathloss_exponent));
    put("w_db", format_double(p.wall_loss_db));
    put("beta", format_double(p.loading));
    put("M", std::to_string(p.macro_antennas));
    put("L", std::to_string(p.small_cell_antennas));
    put("R_u", format_double(p.scattering_radius));
    put("cell_edge_snr_db", format_double(p.cell_edge_snr_db));
    put("p1_over_p0_db", format_double(p.small_cell_power_offset_db));
    put("epsilon1", format_double(p.eps1));
    put("epsilon2", format_double(p.eps2));
    put("slots_per_drop", std::to_string(p.slots_per_drop));
    put("n_drops", std::to_string(p.num_drops));
    put("rank_threshold", format_double(p.rank_threshold));
    put("G", join<int>(c.max_groups, [](const int& x) { return std::to_string(x); }));
    put("gamma", join<double>(c.gammas, [](const double& x) { return format_double(x); }));
    put("N_f", join<int>(c.num_small_cells, [](const int& x) { return std::to_string(x); }));
    put("deployment",
        join<DeploymentMode>(c.deployments, [](const DeploymentMode& x) { return std::string(to_string(x)); }));
    put("policy", join<Policy>(c.policies, [](const Policy& x) { return std::string(to_string(x)); }));
    put("seed", std::to_string(c.seed));
    return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& config)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : resolved_config(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

struct SweepPoint {
    Policy policy;
    DeploymentMode deployment;
    int max_groups;
    double gamma;
    int num_small_cells;
};

struct PointDrop {
    double macro_total = 0.0;
    double sc_total = 0.0;
    std::vector<std::pair<GroupKind, double>> rates;
    std::string error;
};

struct OffloadKey {
    double gamma;
    DeploymentMode deployment;
    int num_small_cells;
};

// Stream ids for seed derivation; a small-cell placement depends only on the
// drop, the deployment law and N_f so that every policy sees the same layout.
constexpr std::uint64_t kPositionsStream = 0;
constexpr std::uint64_t kSlotsStream = 1;
std::uint64_t placement_stream(DeploymentMode mode, int num_small_cells)
{
    return 2 + static_cast<std::uint64_t>(mode) * 1000003ULL + static_cast<std::uint64_t>(num_small_cells);
}

template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn)
{
    std::atomic<int> next{0};
    auto body = [&] {
        for (int i = next++; i < count; i = next++) fn(i);
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
}

std::string hex(std::uint64_t x)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << x;
    return os.str();
}

} // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, std::ostream& log)
{
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    const int drops = config.params.num_drops;
    const std::uint64_t hash = config_hash(config);

    std::vector<SweepPoint> points;
    for (Policy pol : config.policies)
        for (DeploymentMode dep : config.deployments)
            for (int nf : config.num_small_cells)
                for (int g : config.max_groups)
                    for (double gamma : config.gammas) points.push_back({pol, dep, g, gamma, nf});
    std::vector<OffloadKey> offload_keys;
    for (double gamma : config.gammas)
        for (DeploymentMode dep : config.deployments)
            for (int nf : config.num_small_cells) offload_keys.push_back({gamma, dep, nf});

    std::vector<std::vector<PointDrop>> results(points.size(), std::vector<PointDrop>(drops));
    std::vector<std::vector<double>> offload(offload_keys.size(), std::vector<double>(drops, 0.0));
    std::vector<std::string> drop_errors(drops);
    std::mutex log_mutex;

    const int workers = config.workers > 0 ? config.workers
                                           : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    parallel_for(drops, workers, [&](int d) {
        try {
            SimParams base = config.params;
            Rng position_rng(derive_seed(config.seed, d, kPositionsStream));
            const Layout positions = sample_layout(base, position_rng);
            const auto macro = std::make_shared<const MacroStatistics>(build_macro_statistics(positions, base));

            std::map<std::pair<int, int>, DropSetup> setups;
            auto setup_for = [&](DeploymentMode dep, int nf) -> const DropSetup& {
                const auto key = std::make_pair(static_cast<int>(dep), nf);
                auto it = setups.find(key);
                if (it == setups.end()) {
                    Rng rng(derive_seed(config.seed, d, placement_stream(dep, nf)));
                    Layout layout = assign_small_cells(positions, dep, nf, base, rng);
                    it = setups.emplace(key, prepare_drop(std::move(layout), macro, base)).first;
                }
                return it->second;
            };

            for (std::size_t k = 0; k < offload_keys.size(); ++k) {
                const auto& key = offload_keys[k];
                const DropSetup& setup = setup_for(key.deployment, key.num_small_cells);
                const auto target = policy_offload(setup.layout, setup.table, key.gamma, setup.powers);
                const auto moved = std::count_if(target.begin(), target.end(), [](int t) { return t >= 0; });
                const auto eligible = setup.layout.macro_set.size();
                offload[k][d] = eligible ? double(moved) / eligible : 0.0;
            }

            for (std::size_t k = 0; k < points.size(); ++k) {
                const SweepPoint& pt = points[k];
                PointDrop& slot = results[k][d];
                // gamma only matters for offloading; reuse the first gamma's result otherwise
                if (pt.policy != Policy::Offload && pt.gamma != config.gammas.front()) {
                    for (std::size_t j = 0; j < k; ++j) {
                        const SweepPoint& q = points[j];
                        if (q.policy == pt.policy && q.deployment == pt.deployment && q.max_groups == pt.max_groups &&
                            q.num_small_cells == pt.num_small_cells && q.gamma == config.gammas.front()) {
                            slot = results[j][d];
                            break;
                        }
                    }
                    continue;
                }
                try {
                    SimParams params = base;
                    params.max_groups = pt.max_groups;
                    params.gamma = pt.gamma;
                    params.num_small_cells = pt.num_small_cells;
                    Rng slot_rng(derive_seed(config.seed, d, kSlotsStream));
                    const DropResult r =
                        simulate_slots(setup_for(pt.deployment, pt.num_small_cells), pt.policy, params, slot_rng);
                    slot.macro_total = r.macro_total;
                    slot.sc_total = r.sc_total;
                    if (config.write_rate_cdf)
                        for (std::size_t g = 0; g < r.group_rate.size(); ++g)
                            slot.rates.emplace_back(r.group_kind[g], r.group_rate[g]);
                } catch (const std::exception& e) {
                    slot.error = e.what();
                }
            }
            std::lock_guard lock(log_mutex);
            log << "drop " << d + 1 << "/" << drops << " done\n" << std::flush;
        } catch (const std::exception& e) {
            drop_errors[d] = e.what();
        }
    });

    ExperimentReport report;
    report.sweep_points = static_cast<int>(points.size());
    for (int d = 0; d < drops; ++d)
        if (!drop_errors[d].empty()) report.failures.push_back("drop " + std::to_string(d) + ": " + drop_errors[d]);

    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path out(config.out_dir);
    const std::string seed = std::to_string(config.seed);
    const std::string hash_text = hex(hash);

    std::ofstream tradeoff(out / "tradeoff.csv");
    tradeoff << "seed,config_hash,policy,deployment,G,gamma,N_f,drops,macro_total,macro_ci,sc_total,sc_ci,status\n";
    tradeoff << std::setprecision(10);
    std::ofstream ratecdf;
    if (config.write_rate_cdf) {
        ratecdf.open(out / "ratecdf.csv");
        ratecdf << "seed,config_hash,policy,deployment,G,gamma,N_f,group_kind,rate\n" << std::setprecision(10);
    }
    for (std::size_t k = 0; k < points.size(); ++k) {
        const SweepPoint& pt = points[k];
        std::vector<double> macro, sc;
        std::string error;
        for (int d = 0; d < drops; ++d) {
            const PointDrop& r = results[k][d];
            if (!drop_errors[d].empty()) error = drop_errors[d];
            else if (!r.error.empty()) error = r.error;
            else {
                macro.push_back(r.macro_total);
                sc.push_back(r.sc_total);
            }
        }
        std::ostringstream key;
        key << seed << ',' << hash_text << ',' << to_string(pt.policy) << ',' << to_string(pt.deployment) << ','
            << pt.max_groups << ',' << format_double(pt.gamma) << ',' << pt.num_small_cells;
        if (!error.empty()) {
            ++report.failed_points;
            report.failures.push_back(key.str() + ": " + error);
        }
        tradeoff << key.str() << ',' << macro.size() << ',';
        if (macro.empty())
            tradeoff << "nan,nan,nan,nan";
        else
            tradeoff << mean(macro) << ',' << half_width(macro) << ',' << mean(sc) << ',' << half_width(sc);
        tradeoff << ',' << (error.empty() ? "ok" : "failed") << '\n';
        if (config.write_rate_cdf) {
            std::vector<std::pair<GroupKind, double>> pooled;
            for (int d = 0; d < drops; ++d)
                pooled.insert(pooled.end(), results[k][d].rates.begin(), results[k][d].rates.end());
            std::stable_sort(pooled.begin(), pooled.end(),
                             [](const auto& a, const auto& b) { return a.second < b.second; });
            for (const auto& [kind, rate] : pooled)
                ratecdf << key.str() << ',' << to_string(kind) << ',' << rate << '\n';
        }
    }

    std::ofstream offload_csv(out / "offload.csv");
    offload_csv << "seed,config_hash,gamma,deployment,N_f,drops,fraction,fraction_ci\n" << std::setprecision(10);
    for (std::size_t k = 0; k < offload_keys.size(); ++k) {
        std::vector<double> ok;
        for (int d = 0; d < drops; ++d)
            if (drop_errors[d].empty()) ok.push_back(offload[k][d]);
        const auto& key = offload_keys[k];
        offload_csv << seed << ',' << hash_text << ',' << format_double(key.gamma) << ',' << to_string(key.deployment)
                    << ',' << key.num_small_cells << ',' << ok.size() << ',';
        if (ok.empty())
            offload_csv << "nan,nan\n";
        else
            offload_csv << mean(ok) << ',' << half_width(ok) << '\n';
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    nlohmann::ordered_json manifest;
    manifest["schema_version"] = kManifestSchemaVersion;
    manifest["library_version"] = kLibraryVersion;
    manifest["config_hash"] = hash_text;
    manifest["seed"] = config.seed;
    manifest["config"] = resolved_config(config);
    manifest["sweep_points"] = report.sweep_points;
    manifest["failed_points"] = report.failed_points;
    manifest["failures"] = report.failures;
    manifest["files"] = config.write_rate_cdf
                            ? std::vector<std::string>{"tradeoff.csv", "ratecdf.csv", "offload.csv"}
                            : std::vector<std::string>{"tradeoff.csv", "offload.csv"};
    manifest["tradeoff_columns"] = {"seed", "config_hash", "policy", "deployment", "G", "gamma", "N_f", "drops",
                                    "macro_total", "macro_ci", "sc_total", "sc_ci", "status"};
    manifest["workers"] = workers;
    manifest["wall_seconds"] = seconds;
    std::ofstream(out / "manifest.json") << manifest.dump(2) << '\n';
    return report;
}

std::vector<DeValidationPoint> validate_de(const DeValidationOptions& options, std::ostream* log)
{
    if (options.layouts < 1 || options.draws < 1 || options.antennas.empty())
        throw InvalidArgument("validate_de: layouts, draws and antenna list must be positive");
    const std::size_t sizes = options.antennas.size();
    std::vector<std::vector<double>> macro_err(sizes), cell_err(sizes);
    std::vector<SimParams> params(sizes, options.params);
    for (std::size_t a = 0; a < sizes; ++a) {
        params[a].macro_antennas = options.antennas[a];
        params[a].validate();
    }
    const TransmitPowers powers = transmit_powers(options.params);

    for (int i = 0; i < options.layouts; ++i) {
        // Positions and placement do not involve the macro array, so every
        // array size sees the same layout and the same small-cell fading.
        Rng position_rng(derive_seed(options.seed, i, 0));
        Layout layout = sample_layout(options.params, position_rng);
        Rng placement_rng(derive_seed(options.seed, i, 1));
        layout = assign_small_cells(std::move(layout), DeploymentMode::Uniform, options.params.num_small_cells,
                                    options.params, placement_rng);
        const auto& cells = layout.smallcell_set;
        std::vector<CellTierDraw> cell_draws;

        for (std::size_t a = 0; a < sizes; ++a) {
            auto macro = std::make_shared<const MacroStatistics>(build_macro_statistics(layout, params[a]));
            const LinkGainTable table(macro, layout, params[a]);
            Rng schedule_rng(derive_seed(options.seed, i, 2));
            ScheduleState state(layout.size());
            const auto groups =
                select_user_groups(state, layout.macro_set, params[a].max_groups, table, powers, schedule_rng);

            const ChannelSampler sampler(table, groups, cells);
            if (cell_draws.empty()) {
                Rng cell_rng(derive_seed(options.seed, i, 4));
                for (int d = 0; d < options.draws; ++d) cell_draws.push_back(sampler.draw_cell_tier(cell_rng));
            }
            Rng macro_rng(derive_seed(options.seed, i, 3));
            const SinrMedians medians = empirical_sinr_medians(sampler, powers, cell_draws, macro_rng, options.macro_zf);
            for (std::size_t k = 0; k < groups.size(); ++k) {
                const double de = macro_sinr_de(groups[k], groups, cells, table, powers);
                macro_err[a].push_back(std::abs(medians.macro[k] - de) / de);
            }
            for (std::size_t k = 0; k < cells.size(); ++k) {
                const double de = smallcell_sinr_de(cells[k], groups, cells, table, powers);
                cell_err[a].push_back(std::abs(medians.cells[k] - de) / de);
            }
        }
    }

    std::vector<DeValidationPoint> out;
    for (std::size_t a = 0; a < sizes; ++a) {
        DeValidationPoint pt;
        pt.antennas = options.antennas[a];
        pt.macro_groups = static_cast<int>(macro_err[a].size());
        pt.cells = static_cast<int>(cell_err[a].size());
        std::vector<double> pooled = macro_err[a];
        pooled.insert(pooled.end(), cell_err[a].begin(), cell_err[a].end());
        pt.macro_error = median(macro_err[a]);
        pt.cell_error = cell_err[a].empty() ? 0.0 : median(cell_err[a]);
        pt.pooled_error = median(pooled);
        if (log)
            *log << "M=" << pt.antennas << " macro median error " << pt.macro_error << " (" << pt.macro_groups
                 << " groups), small-cell median error " << pt.cell_error << " (" << pt.cells
                 << " cells), pooled " << pt.pooled_error << "\n";
        out.push_back(pt);
    }
    return out;
}

} // namespace hetnet

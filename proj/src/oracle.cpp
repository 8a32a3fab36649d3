#include "gelkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "gelkit/errors.hpp"
#include "gelkit/parallel.hpp"

namespace gelkit {

// ---------------------------------------------------------------------------
// Master equation
// ---------------------------------------------------------------------------

Eigen::VectorXd MasterState::mu() const
{
    const int r = species.empty() ? 0 : static_cast<int>(species.front().groups.size());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(r);
    for (const auto& table : tables)
        for (std::size_t f = 0; f < table.size(); ++f) {
            const auto i = table.degrees(f);
            for (int k = 0; k < r; ++k)
                out(k) += i[static_cast<std::size_t>(k)] * table[f];
        }
    return out;
}

double MasterState::species_mass(std::size_t s) const
{
    const auto& v = tables[s].values();
    return std::accumulate(v.begin(), v.end(), 0.0);
}

MasterTrajectory::MasterTrajectory(SystemSpec spec, std::vector<DegreeTable> layout, ode::DenseSolution solution)
    : spec_(std::move(spec)), layout_(std::move(layout)), solution_(std::move(solution))
{
}

MasterState MasterTrajectory::state(double t) const
{
    if (!(t >= 0.0 && t <= t_end()))
        throw DomainError("master trajectory: t outside [0, t_end]");
    const Eigen::VectorXd y = solution_.value(t);
    MasterState out{t, spec_.distribution.species, layout_};
    Eigen::Index offset = 0;
    for (auto& table : out.tables)
        for (std::size_t f = 0; f < table.size(); ++f)
            table[f] = y(offset++);
    return out;
}

MasterTrajectory integrate_master(const SystemSpec& spec, double t_end, const OdeTolerance& tol)
{
    if (!(t_end > 0.0))
        throw DomainError("integrate_master: t_end must be positive");
    const int r = spec.group_types();
    const MomentSet moments = moment_set(spec.distribution);

    // Flat state: species tables back to back. For each state precompute the
    // degrees, the free-group counts and the index of each predecessor i - e_k.
    struct Cell {
        std::vector<int> degree;
        std::vector<int> free;
        std::vector<Eigen::Index> pred; // -1 when i_k = 0
    };
    std::vector<DegreeTable> layout;
    std::vector<Cell> cells;
    Eigen::VectorXd y0;
    {
        std::size_t total = 0;
        for (const auto& s : spec.distribution.species) {
            std::vector<int> extents(s.groups.size());
            std::size_t states = 1;
            for (std::size_t k = 0; k < extents.size(); ++k) {
                extents[k] = s.groups[k] + 1;
                states *= static_cast<std::size_t>(extents[k]);
            }
            if (states > kMaxMasterStates)
                throw DomainError("integrate_master: species rectangle has " + std::to_string(states) +
                                  " states, limit is " + std::to_string(kMaxMasterStates));
            layout.emplace_back(std::move(extents));
            total += states;
        }
        y0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total));
        Eigen::Index offset = 0;
        for (std::size_t s = 0; s < layout.size(); ++s) {
            const auto& table = layout[s];
            const auto& groups = spec.distribution.species[s].groups;
            for (std::size_t f = 0; f < table.size(); ++f) {
                Cell c;
                c.degree = table.degrees(f);
                c.free.resize(static_cast<std::size_t>(r));
                c.pred.resize(static_cast<std::size_t>(r));
                for (int k = 0; k < r; ++k) {
                    const auto kk = static_cast<std::size_t>(k);
                    c.free[kk] = groups[kk] - c.degree[kk];
                    if (c.degree[kk] > 0) {
                        auto prev = c.degree;
                        --prev[kk];
                        c.pred[kk] = offset + static_cast<Eigen::Index>(table.flat_index(prev));
                    } else {
                        c.pred[kk] = -1;
                    }
                }
                cells.push_back(std::move(c));
            }
            y0(offset) = spec.distribution.species[s].fraction;
            offset += static_cast<Eigen::Index>(table.size());
        }
    }

    const Eigen::MatrixXd& w = spec.weights.w;
    const Eigen::VectorXd& nu = moments.nu1;
    auto rhs = [&](double, const ode::Vector& y, ode::Vector& dy) {
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(r);
        for (std::size_t c = 0; c < cells.size(); ++c)
            for (int k = 0; k < r; ++k)
                mu(k) += cells[c].degree[static_cast<std::size_t>(k)] * y(static_cast<Eigen::Index>(c));
        const Eigen::VectorXd hazard = w * (nu - mu);
        dy.resize(y.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto& cell = cells[c];
            double v = 0.0;
            for (int k = 0; k < r; ++k) {
                const auto kk = static_cast<std::size_t>(k);
                if (cell.pred[kk] >= 0)
                    v += hazard(k) * (cell.free[kk] + 1) * y(cell.pred[kk]);
                v -= hazard(k) * cell.free[kk] * y(static_cast<Eigen::Index>(c));
            }
            dy(static_cast<Eigen::Index>(c)) = v;
        }
    };

    ode::Options opt;
    opt.rtol = tol.rtol;
    opt.atol = tol.atol;
    auto sol = ode::integrate(rhs, 0.0, y0, t_end, opt);
    return MasterTrajectory(spec, std::move(layout), std::move(sol));
}

// ---------------------------------------------------------------------------
// Stochastic network growth
// ---------------------------------------------------------------------------

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::int32_t find(std::int32_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Merges the sets of a and b; returns the new root or -1 when already joined.
    std::int32_t unite(std::int32_t a, std::int32_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return -1;
        if (size_[a] < size_[b])
            std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return a;
    }

    std::int64_t size(std::int32_t root) const { return size_[root]; }

private:
    std::vector<std::int32_t> parent_;
    std::vector<std::int64_t> size_;
};

// Number of monomers of each species: floor(f N) plus largest remainders.
std::vector<std::int64_t> composition(const MonomerDistribution& dist, std::int64_t n)
{
    std::vector<std::int64_t> counts(dist.species.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::int64_t assigned = 0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
        const double exact = dist.species[s].fraction * static_cast<double>(n);
        counts[s] = static_cast<std::int64_t>(std::floor(exact));
        assigned += counts[s];
        remainders.emplace_back(exact - std::floor(exact), s);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n && i < remainders.size(); ++i, ++assigned)
        ++counts[remainders[i].second];
    return counts;
}

constexpr int kMaxRedraws = 1000;

} // namespace

double McRun::size_fraction(int s) const
{
    if (s < 1 || s >= static_cast<int>(count_by_size.size()))
        return 0.0;
    return static_cast<double>(s) * static_cast<double>(count_by_size[static_cast<std::size_t>(s)]) /
           static_cast<double>(monomers);
}

McRun simulate(const SystemSpec& spec, const McOptions& options)
{
    if (options.monomers < 10)
        throw DomainError("simulate: need at least 10 monomers");
    if (options.monomers > std::numeric_limits<std::int32_t>::max())
        throw DomainError("simulate: too many monomers");
    if (!std::is_sorted(options.sample_times.begin(), options.sample_times.end()))
        throw DomainError("simulate: sample times must be ascending");

    const int r = spec.group_types();
    const auto n = options.monomers;
    const double dn = static_cast<double>(n);
    const Eigen::MatrixXd& w = spec.weights.w;

    McRun run;
    run.monomers = n;
    run.seed = options.seed;
    run.t_end = options.t_end;
    run.degrees.assign(static_cast<std::size_t>(n * r), 0);
    run.initial_groups.assign(static_cast<std::size_t>(r), 0);

    // One entry per free group: the monomer carrying it.
    std::vector<std::vector<std::int32_t>> free(static_cast<std::size_t>(r));
    {
        const auto counts = composition(spec.distribution, n);
        std::int32_t id = 0;
        for (std::size_t s = 0; s < counts.size(); ++s)
            for (std::int64_t c = 0; c < counts[s]; ++c, ++id)
                for (int k = 0; k < r; ++k)
                    for (int g = 0; g < spec.distribution.species[s].groups[static_cast<std::size_t>(k)]; ++g)
                        free[static_cast<std::size_t>(k)].push_back(id);
        for (int k = 0; k < r; ++k)
            run.initial_groups[static_cast<std::size_t>(k)] =
                static_cast<std::int64_t>(free[static_cast<std::size_t>(k)].size());
    }

    struct Channel {
        int m, n;
        double weight;
    };
    std::vector<Channel> channels;
    for (int m = 0; m < r; ++m)
        for (int k = m; k < r; ++k)
            if (w(m, k) > 0.0)
                channels.push_back({m, k, w(m, k)});

    std::mt19937_64 rng(options.seed);
    DisjointSets sets(static_cast<std::size_t>(n));
    std::int64_t largest = 1;
    double sum_sq = dn; // sum of squared component sizes
    const double threshold = std::pow(dn, 2.0 / 3.0);
    std::vector<double> bond_ends(static_cast<std::size_t>(r), 0.0);

    auto record = [&](double t) {
        McSample s;
        s.t = t;
        s.mu_hat.resize(static_cast<std::size_t>(r));
        for (int k = 0; k < r; ++k)
            s.mu_hat[static_cast<std::size_t>(k)] = bond_ends[static_cast<std::size_t>(k)] / dn;
        s.largest_fraction = static_cast<double>(largest) / dn;
        s.susceptibility = (sum_sq - static_cast<double>(largest) * static_cast<double>(largest)) / dn;
        run.samples.push_back(std::move(s));
    };
    std::size_t next_sample = 0;
    auto flush_samples = [&](double upto) {
        while (next_sample < options.sample_times.size() && options.sample_times[next_sample] <= upto)
            record(options.sample_times[next_sample++]);
    };

    std::vector<double> rates(channels.size());
    double t = 0.0;
    for (;;) {
        double total = 0.0;
        for (std::size_t c = 0; c < channels.size(); ++c) {
            const auto gm = static_cast<double>(free[static_cast<std::size_t>(channels[c].m)].size());
            const auto gn = static_cast<double>(free[static_cast<std::size_t>(channels[c].n)].size());
            rates[c] = channels[c].m == channels[c].n ? channels[c].weight * gm * (gm - 1.0) / (2.0 * dn)
                                                      : channels[c].weight * gm * gn / dn;
            total += rates[c];
        }
        if (!(total > 0.0)) {
            run.absorbed = true;
            break;
        }
        t += std::exponential_distribution<double>(total)(rng);
        if (t > options.t_end)
            break;
        flush_samples(t);

        double pick = std::uniform_real_distribution<double>(0.0, total)(rng);
        std::size_t c = 0;
        while (c + 1 < channels.size() && pick >= rates[c]) {
            pick -= rates[c];
            ++c;
        }
        auto& fm = free[static_cast<std::size_t>(channels[c].m)];
        auto& fn = free[static_cast<std::size_t>(channels[c].n)];
        const bool same = channels[c].m == channels[c].n;

        std::size_t ia = 0, ib = 0;
        bool found = false;
        for (int attempt = 0; attempt < kMaxRedraws && !found; ++attempt) {
            ia = std::uniform_int_distribution<std::size_t>(0, fm.size() - 1)(rng);
            ib = std::uniform_int_distribution<std::size_t>(0, fn.size() - 1)(rng);
            found = !(same && ia == ib) && fm[ia] != fn[ib];
        }
        if (!found) {
            // Only self-bonds remain possible in this channel; treat as absorbing.
            run.absorbed = true;
            break;
        }

        const std::int32_t a = fm[ia];
        const std::int32_t b = fn[ib];
        if (same) {
            const auto hi = std::max(ia, ib), lo = std::min(ia, ib);
            fm[hi] = fm.back();
            fm.pop_back();
            fm[lo] = fm.back();
            fm.pop_back();
        } else {
            fm[ia] = fm.back();
            fm.pop_back();
            fn[ib] = fn.back();
            fn.pop_back();
        }
        ++run.degrees[static_cast<std::size_t>(a) * r + channels[c].m];
        ++run.degrees[static_cast<std::size_t>(b) * r + channels[c].n];
        bond_ends[static_cast<std::size_t>(channels[c].m)] += 1.0;
        bond_ends[static_cast<std::size_t>(channels[c].n)] += 1.0;
        if (options.record_events)
            run.events.push_back({t, channels[c].m, channels[c].n, a, b});

        const auto sa = static_cast<double>(sets.size(sets.find(a)));
        const auto sb = static_cast<double>(sets.size(sets.find(b)));
        const std::int32_t root = sets.unite(a, b);
        if (root >= 0) {
            sum_sq += 2.0 * sa * sb;
            largest = std::max(largest, sets.size(root));
            if (!run.threshold_time && static_cast<double>(largest) > threshold)
                run.threshold_time = t;
            const double chi = (sum_sq - static_cast<double>(largest) * static_cast<double>(largest)) / dn;
            if (chi > run.susceptibility_peak) {
                run.susceptibility_peak = chi;
                run.susceptibility_peak_time = t;
            }
        }
    }
    run.t_final = run.absorbed ? t : options.t_end;
    flush_samples(options.t_end);

    run.largest = largest;
    for (int k = 0; k < r; ++k)
        run.free_groups.push_back(static_cast<std::int64_t>(free[static_cast<std::size_t>(k)].size()));
    run.count_by_size.assign(static_cast<std::size_t>(largest) + 1, 0);
    for (std::int32_t m = 0; m < static_cast<std::int32_t>(n); ++m)
        if (sets.find(m) == m)
            ++run.count_by_size[static_cast<std::size_t>(sets.size(m))];
    return run;
}

std::vector<McRun> simulate_replicas(const SystemSpec& spec, const McOptions& options, int replicas, int threads)
{
    if (replicas < 1)
        throw DomainError("simulate_replicas: need at least one replica");
    return parallel_map(static_cast<std::size_t>(replicas), worker_count(threads), [&](std::size_t i) {
        McOptions o = options;
        o.seed = options.seed + i;
        return simulate(spec, o);
    });
}

GiantOnset giant_onset(const McRun& run)
{
    GiantOnset out;
    if (!run.threshold_time)
        return out;
    out.threshold_time = run.threshold_time;
    out.susceptibility_peak_time = run.susceptibility_peak_time;
    return out;
}

} // namespace gelkit

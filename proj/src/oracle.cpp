#include "optomech/oracle.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <fftw3.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <thread>

namespace optomech::oracle {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint64_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kW0;
            key[1] += kW1;
        }
        const std::uint64_t p0 = kM0 * ctr[0];
        const std::uint64_t p1 = kM1 * ctr[2];
        ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
               std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
    }
    return ctr;
}

std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t a, std::uint32_t b, std::uint32_t stream) {
    const auto x = philox4x32({std::uint32_t(a), std::uint32_t(a >> 32), b, stream},
                              {std::uint32_t(seed), std::uint32_t(seed >> 32)});
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    const double u1 = (double(((std::uint64_t(x[0]) << 32) | x[1]) >> 11) + 0.5) * kScale;
    const double u2 = (double(((std::uint64_t(x[2]) << 32) | x[3]) >> 11) + 0.5) * kScale;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

namespace {

enum Stream : std::uint32_t { kThermal = 0, kBackaction = 1, kFeedbackSc = 2, kFeedbackCd = 3 };

double gaussian(std::uint64_t seed, std::uint64_t step, std::uint32_t traj, Stream stream) {
    return normal_pair(seed, step, traj, stream)[0];
}

// FFTW planning is not thread-safe; execution on fresh arrays is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

struct Plans {
    fftw_plan synth = nullptr;  // c2r of the feedback-noise length
    fftw_plan welch = nullptr;  // r2c of one segment
    ~Plans() {
        std::lock_guard lock(plan_mutex());
        if (synth) fftw_destroy_plan(synth);
        if (welch) fftw_destroy_plan(welch);
    }
};

template <class T>
struct FftwBuffer {
    T* data = nullptr;
    explicit FftwBuffer(std::size_t n) : data(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)))) {
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

struct Setup {
    SchemeParams s;
    SimConfig cfg;
    std::optional<nonstat::ForcePulse> force;
    Eigen::Matrix2d half_step;  // exp(A dt / 2)
    double dt_noise = 0;
    double sd_thermal = 0, sd_backaction = 0, sd_feedback_sc = 0;
    double fb_density = 0;  // cd: density / omega^2
    FeedbackBand band;
    std::size_t n_fft = 0;
    double blowup = 0;
    std::uint64_t n_samples = 0;  // decimated samples for the spectrum
};

struct TrajResult {
    double q2 = 0, p2 = 0, qp = 0, q = 0, p = 0, cross = 0;
    std::vector<double> spectrum;
    bool diverged = false;
    double q_at_divergence = 0;
};

void synthesize_feedback(const Setup& su, const Plans& plans, std::uint32_t traj, double* out) {
    const std::size_t n = su.n_fft;
    FftwBuffer<fftw_complex> spec(n / 2 + 1);
    const double dw = 2.0 * std::numbers::pi / (double(n) * su.dt_noise);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        spec.data[k][0] = spec.data[k][1] = 0.0;
        const double w = dw * double(k);
        if (k == 0 || k == n / 2 || !su.band.contains(w)) continue;
        const double amp = std::sqrt(double(n) * su.fb_density * w * w / su.dt_noise / 2.0);
        const auto z = normal_pair(su.cfg.seed, k, traj, kFeedbackCd);
        spec.data[k][0] = amp * z[0];
        spec.data[k][1] = amp * z[1];
    }
    fftw_execute_dft_c2r(plans.synth, spec.data, out);
    const double inv = 1.0 / double(n);
    for (std::size_t j = 0; j < n; ++j) out[j] *= inv;
}

std::vector<double> welch(const Setup& su, const Plans& plans, const std::vector<double>& x) {
    const std::size_t L = su.cfg.segment_length;
    const std::size_t hop = L / 2;
    const double dts = su.cfg.dt * su.cfg.decimation;
    std::vector<double> w(L);
    double wsum = 0;
    for (std::size_t n = 0; n < L; ++n) {
        w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * double(n) / double(L)));
        wsum += w[n] * w[n];
    }
    FftwBuffer<double> in(L);
    FftwBuffer<fftw_complex> out(L / 2 + 1);
    std::vector<double> acc(L / 2 + 1, 0.0);
    std::size_t segs = 0;
    for (std::size_t start = 0; start + L <= x.size(); start += hop, ++segs) {
        for (std::size_t n = 0; n < L; ++n) in.data[n] = w[n] * x[start + n];
        fftw_execute_dft_r2c(plans.welch, in.data, out.data);
        for (std::size_t k = 0; k <= L / 2; ++k) {
            acc[k] += dts * (out.data[k][0] * out.data[k][0] + out.data[k][1] * out.data[k][1]) / wsum;
        }
    }
    for (double& a : acc) a /= double(segs);
    return acc;
}

TrajResult run_trajectory(const Setup& su, const Plans& plans, std::uint32_t traj) {
    const SimConfig& cfg = su.cfg;
    const bool cd = su.s.scheme == Scheme::ColdDamping;
    const std::uint32_t r = cfg.noise_substeps;
    const std::uint64_t total = cfg.burn_in_steps + cfg.n_steps;

    std::optional<FftwBuffer<double>> xi;
    if (cd && su.fb_density > 0) {
        xi.emplace(su.n_fft);
        synthesize_feedback(su, plans, traj, xi->data);
    }

    TrajResult res;
    std::vector<double> samples;
    if (cfg.estimator == Estimator::Spectrum) samples.reserve(su.n_samples);
    double sba2 = 0, sfb2 = 0, sbafb = 0;
    Eigen::Vector2d x(0.0, 0.0);
    for (std::uint64_t n = 0; n < total; ++n) {
        double dwq = 0, dwp = 0, ba = 0, fb = 0;
        for (std::uint32_t i = 0; i < r; ++i) {
            const std::uint64_t j = n * r + i;
            if (su.sd_thermal > 0) dwp += su.sd_thermal * gaussian(cfg.seed, j, traj, kThermal);
            if (su.sd_backaction > 0) ba += su.sd_backaction * gaussian(cfg.seed, j, traj, kBackaction);
            if (su.sd_feedback_sc > 0) fb += su.sd_feedback_sc * gaussian(cfg.seed, j, traj, kFeedbackSc);
            if (xi) fb += xi->data[j] * su.dt_noise;
        }
        dwp += ba;
        if (cd) {
            dwp += fb;
        } else {
            dwq += fb;
        }
        if (su.force && n >= cfg.burn_in_steps) {
            const double t = (double(n - cfg.burn_in_steps) + 0.5) * cfg.dt;
            dwp += (*su.force)(t) * cfg.dt;
        }
        // Strang splitting: half drift, noise kick, half drift.
        x = su.half_step * x;
        x[0] += dwq;
        x[1] += dwp;
        x = su.half_step * x;

        if (!(std::abs(x[0]) <= su.blowup)) {
            res.diverged = true;
            res.q_at_divergence = x[0];
            return res;
        }
        if (n < cfg.burn_in_steps) continue;
        res.q2 += x[0] * x[0];
        res.p2 += x[1] * x[1];
        res.qp += x[0] * x[1];
        res.q += x[0];
        res.p += x[1];
        sba2 += ba * ba;
        sfb2 += fb * fb;
        sbafb += ba * fb;
        if (cfg.estimator == Estimator::Spectrum && (n - cfg.burn_in_steps) % cfg.decimation == 0) {
            samples.push_back(x[0]);
        }
    }
    const double inv = 1.0 / double(cfg.n_steps);
    res.q2 *= inv;
    res.p2 *= inv;
    res.qp *= inv;
    res.q *= inv;
    res.p *= inv;
    res.cross = (sba2 > 0 && sfb2 > 0) ? sbafb / std::sqrt(sba2 * sfb2) : 0.0;
    if (cfg.estimator == Estimator::Spectrum) res.spectrum = welch(su, plans, samples);
    return res;
}

Estimate reduce(const std::vector<TrajResult>& rs, double TrajResult::*field) {
    const double n = double(rs.size());
    double mean = 0;
    for (const auto& r : rs) mean += r.*field;
    mean /= n;
    double ss = 0;
    for (const auto& r : rs) ss += (r.*field - mean) * (r.*field - mean);
    return {mean, std::sqrt(ss / (n * (n - 1.0)))};
}

}  // namespace

void SimConfig::validate(const SchemeParams& s) const {
    const double limit = std::min(1.0 / 50.0, 1.0 / (50.0 * s.damping()));
    if (!(dt > 0) || dt > limit * (1.0 + 1e-12)) throw InvalidParameter("dt exceeds min(1/50, 1/(50 gamma_m (1+g)))");
    if (n_traj < 2) throw InvalidParameter("n_traj must be at least 2 for error bars");
    if (n_steps < 1) throw InvalidParameter("n_steps must be positive");
    if (noise_substeps < 1 || decimation < 1) throw InvalidParameter("noise_substeps and decimation must be positive");
    if (estimator == Estimator::Spectrum) {
        if (segment_length < 8 || segment_length % 2) throw InvalidParameter("segment_length must be even and >= 8");
        if (n_steps / decimation < segment_length) throw InvalidParameter("too few samples for one spectrum segment");
    }
    if (fb_band && !(fb_band->hi > fb_band->lo && fb_band->lo >= 0)) throw InvalidParameter("feedback band is empty");
}

std::string EnsembleStats::to_json() const {
    nlohmann::ordered_json j;
    j["q2"] = q2.value;
    j["q2_err"] = q2.error;
    j["p2"] = p2.value;
    j["p2_err"] = p2.error;
    j["qp"] = qp.value;
    j["qp_err"] = qp.error;
    j["seed"] = seed;
    j["n_traj"] = n_traj;
    j["dt"] = dt;
    return j.dump(2);
}

EnsembleStats simulate(const SchemeParams& s, const SimConfig& cfg, const std::optional<nonstat::ForcePulse>& force) {
    s.validate();
    cfg.validate(s);
    if (force) force->validate();

    Setup su;
    su.s = s;
    su.cfg = cfg;
    su.force = force;
    su.dt_noise = cfg.dt / cfg.noise_substeps;
    su.band = cfg.fb_band ? *cfg.fb_band : s.feedback_band();

    const double gm = s.gamma();
    const double g = s.gain();
    Eigen::Matrix2d a;
    if (s.scheme == Scheme::ColdDamping) {
        a << 0.0, 1.0, -1.0, -gm * (1.0 + g);
    } else {
        a << -g * gm, 1.0, -1.0, -gm;
    }
    su.half_step = (a * (0.5 * cfg.dt)).exp();

    const steady::NoiseStrengths ns = steady::noise_strengths(s);
    if (cfg.thermal_noise) su.sd_thermal = std::sqrt(gm * s.theta * su.dt_noise);
    if (cfg.backaction_noise) su.sd_backaction = std::sqrt(0.25 * gm * s.zeta * su.dt_noise);
    if (cfg.feedback_noise) {
        su.sd_feedback_sc = std::sqrt(ns.d_q * su.dt_noise);
        su.fb_density = ns.d_fb_cd;
    }
    const std::uint64_t total = cfg.burn_in_steps + cfg.n_steps;
    if (su.fb_density > 0) {
        if (su.band.hi > 0.5 * std::numbers::pi / su.dt_noise) {
            throw InvalidParameter("feedback band extends beyond half the Nyquist frequency of the noise grid");
        }
        su.n_fft = next_pow2(std::size_t(total * cfg.noise_substeps));
    }
    su.blowup = 1e6 * std::sqrt(steady::steady_moments(s).q2);
    su.n_samples = cfg.n_steps / cfg.decimation + 1;

    Plans plans;
    {
        std::lock_guard lock(plan_mutex());
        if (su.n_fft) {
            FftwBuffer<fftw_complex> in(su.n_fft / 2 + 1);
            FftwBuffer<double> out(su.n_fft);
            plans.synth = fftw_plan_dft_c2r_1d(int(su.n_fft), in.data, out.data, FFTW_ESTIMATE);
        }
        if (cfg.estimator == Estimator::Spectrum) {
            FftwBuffer<double> in(cfg.segment_length);
            FftwBuffer<fftw_complex> out(cfg.segment_length / 2 + 1);
            plans.welch = fftw_plan_dft_r2c_1d(int(cfg.segment_length), in.data, out.data, FFTW_ESTIMATE);
        }
    }

    std::vector<TrajResult> results(cfg.n_traj);
    std::atomic<std::uint32_t> next{0};
    auto worker = [&] {
        for (std::uint32_t t = next++; t < cfg.n_traj; t = next++) results[t] = run_trajectory(su, plans, t);
    };
    unsigned nt = cfg.n_threads ? cfg.n_threads : std::max(1u, std::thread::hardware_concurrency());
    nt = std::min<unsigned>(nt, cfg.n_traj);
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < nt; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (std::uint32_t t = 0; t < cfg.n_traj; ++t) {
        if (results[t].diverged) {
            throw NumericalError("simulate: trajectory " + std::to_string(t) + " diverged", su.blowup,
                                 std::abs(results[t].q_at_divergence));
        }
    }

    EnsembleStats st;
    st.q2 = reduce(results, &TrajResult::q2);
    st.p2 = reduce(results, &TrajResult::p2);
    st.qp = reduce(results, &TrajResult::qp);
    st.mean_q = reduce(results, &TrajResult::q);
    st.mean_p = reduce(results, &TrajResult::p);
    st.noise_cross = reduce(results, &TrajResult::cross);
    st.seed = cfg.seed;
    st.n_traj = cfg.n_traj;
    st.dt = cfg.dt;
    if (cfg.estimator == Estimator::Spectrum) {
        const std::size_t nb = cfg.segment_length / 2 + 1;
        const double dw = 2.0 * std::numbers::pi / (double(cfg.segment_length) * cfg.dt * cfg.decimation);
        st.omegas.resize(nb);
        st.spectrum.assign(nb, 0.0);
        st.spectrum_err.assign(nb, 0.0);
        const double n = double(cfg.n_traj);
        for (std::size_t k = 0; k < nb; ++k) {
            st.omegas[k] = dw * double(k);
            double mean = 0;
            for (const auto& r : results) mean += r.spectrum[k];
            mean /= n;
            double ss = 0;
            for (const auto& r : results) ss += (r.spectrum[k] - mean) * (r.spectrum[k] - mean);
            st.spectrum[k] = mean;
            st.spectrum_err[k] = std::sqrt(ss / (n * (n - 1.0)));
        }
    }
    return st;
}

namespace {

void add_entry(CompareReport& rep, std::string name, double analytic, const Estimate& e, double threshold) {
    ZEntry z{std::move(name), analytic, e.value, e.error, 0.0};
    const double diff = e.value - analytic;
    z.z = e.error > 0 ? diff / e.error : (diff == 0 ? 0.0 : INFINITY);
    if (!(std::abs(z.z) <= threshold)) {
        rep.pass = false;
        rep.failures.push_back(z.name);
    }
    rep.entries.push_back(std::move(z));
}

}  // namespace

CompareReport compare(const steady::MomentSet& analytic, const EnsembleStats& empirical, double threshold) {
    CompareReport rep;
    add_entry(rep, "q2", analytic.q2, empirical.q2, threshold);
    add_entry(rep, "p2", analytic.p2, empirical.p2, threshold);
    add_entry(rep, "qp", analytic.qp, empirical.qp, threshold);
    return rep;
}

CompareReport compare(const spectra::SpectrumSeries& analytic, const EnsembleStats& empirical, double threshold) {
    if (empirical.omegas.empty()) throw InvalidParameter("empirical statistics carry no spectrum");
    CompareReport rep;
    const double dw = empirical.omegas.size() > 1 ? empirical.omegas[1] - empirical.omegas[0] : 1.0;
    for (std::size_t i = 0; i < analytic.omegas.size(); ++i) {
        const double w = analytic.omegas[i];
        const auto it = std::lower_bound(empirical.omegas.begin(), empirical.omegas.end(), w - 1e-9 * dw);
        if (it == empirical.omegas.end() || std::abs(*it - w) > 1e-9 * dw + 1e-12 * std::abs(w)) {
            throw InvalidParameter("spectrum shapes differ: no empirical bin at the requested frequency");
        }
        const std::size_t k = std::size_t(it - empirical.omegas.begin());
        char name[48];
        std::snprintf(name, sizeof name, "S(%.6g)", w);
        add_entry(rep, name, analytic.values[i], {empirical.spectrum[k], empirical.spectrum_err[k]}, threshold);
    }
    return rep;
}

}  // namespace optomech::oracle

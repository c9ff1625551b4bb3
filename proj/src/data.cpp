#include "changedyn/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "changedyn/csv.hpp"
#include "changedyn/errors.hpp"
#include "changedyn/rng.hpp"

namespace changedyn::data {

namespace {

constexpr std::uint64_t kGeneratorChannel = 11;

void validate_segments(const std::vector<Segment>& segments, std::int64_t horizon) {
    if (segments.empty()) throw InvalidConfigError("segments must not be empty");
    std::int64_t expect = 1;
    for (const auto& s : segments) {
        if (s.start != expect || s.end < s.start)
            throw InvalidConfigError("segments must tile 1..horizon without overlap");
        expect = s.end + 1;
    }
    if (expect != horizon + 1)
        throw InvalidConfigError("segments must tile 1..horizon without overlap");
}

double parse_double(const std::string& s, std::size_t row, const std::string& column) {
    const char* c = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(c, &end);
    if (end == c || *end != '\0')
        throw CsvError(row, "non-numeric value '" + s + "' in column '" + column + "'");
    return v;
}

std::int64_t parse_int(const std::string& s, std::size_t row, const std::string& column) {
    const char* c = s.c_str();
    char* end = nullptr;
    const long long v = std::strtoll(c, &end, 10);
    if (end == c || *end != '\0')
        throw CsvError(row, "non-integer value '" + s + "' in column '" + column + "'");
    return v;
}

}  // namespace

SyntheticSpec SyntheticSpec::mean_drift_default(std::uint64_t seed) {
    SyntheticSpec s;
    s.horizon = 225;
    s.mu0 = 1.0;
    s.noise_sd = 0.05;
    s.segments = {{1, 25, 0, 0.0}, {26, 125, 1, -0.002}, {126, 225, 0, 0.0}};
    s.seed = seed;
    return s;
}

std::vector<StreamRecord> generate_mean_drift(const SyntheticSpec& spec) {
    validate_segments(spec.segments, spec.horizon);
    if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.mu0))
        throw InvalidConfigError("mean-drift spec: bad mu0 or noise_sd");

    RngStream rng = RngStream::derive(spec.seed, kGeneratorChannel);
    std::vector<StreamRecord> out;
    out.reserve(static_cast<std::size_t>(spec.horizon));
    double mu = spec.mu0;
    for (const auto& seg : spec.segments) {
        for (std::int64_t t = seg.start; t <= seg.end; ++t) {
            mu += seg.nu;  // the mean path itself is noise-free
            StreamRecord r;
            r.t = t;
            r.x = mu + spec.noise_sd * rng.normal();
            r.mu_true = mu;
            r.state_true = seg.state;
            r.nu_true = seg.nu;
            out.push_back(r);
        }
    }
    return out;
}

std::vector<Segment> SeizureSurrogateSpec::segments() const {
    std::vector<Segment> segs;
    std::int64_t pos = 1;
    auto push = [&](std::int64_t len, int state, double nu) {
        if (len <= 0) return;
        segs.push_back({pos, pos + len - 1, state, nu});
        pos += len;
    };
    const double rise = onset > 0 ? (log_sigma_hi - log_sigma_lo) / static_cast<double>(onset) : 0.0;
    const double fall =
        termination > 0 ? (log_sigma_lo - log_sigma_hi) / static_cast<double>(termination) : 0.0;
    push(head, 0, 0.0);
    push(onset, 1, rise);
    push(plateau, 0, 0.0);
    push(termination, 2, fall);
    push(tail, 0, 0.0);
    return segs;
}

std::vector<StreamRecord> generate_seizure_surrogate(const SeizureSurrogateSpec& spec) {
    const auto segs = spec.segments();
    validate_segments(segs, spec.horizon());

    RngStream rng = RngStream::derive(spec.seed, kGeneratorChannel, 1);
    std::vector<StreamRecord> out;
    out.reserve(static_cast<std::size_t>(spec.horizon()));
    double log_sigma = spec.log_sigma_lo;
    double xm1 = 0.0;
    double xm2 = 0.0;
    for (const auto& seg : segs) {
        for (std::int64_t t = seg.start; t <= seg.end; ++t) {
            log_sigma += seg.nu;
            const double x =
                spec.alpha1 * xm1 + spec.alpha2 * xm2 + std::exp(log_sigma) * rng.normal();
            StreamRecord r;
            r.t = t;
            r.x = x;
            r.state_true = seg.state;
            r.nu_true = seg.nu;
            out.push_back(r);
            xm2 = xm1;
            xm1 = x;
        }
    }
    return out;
}

std::vector<GroundTruthChange> truth_changes(const std::vector<Segment>& segments) {
    std::vector<GroundTruthChange> out;
    for (std::size_t i = 1; i < segments.size(); ++i)
        out.push_back({segments[i].start - 1, segments[i].state});
    return out;
}

namespace {

struct Biquad {
    double b0, b1, b2, a1, a2;
};

Biquad lowpass_biquad(double cutoff_hz, double sample_hz, double q) {
    const double w0 = 2.0 * 3.14159265358979323846 * cutoff_hz / sample_hz;
    const double cw = std::cos(w0);
    const double sw = std::sin(w0);
    const double alpha = sw / (2.0 * q);
    const double a0 = 1.0 + alpha;
    return {(1.0 - cw) / 2.0 / a0, (1.0 - cw) / a0, (1.0 - cw) / 2.0 / a0, -2.0 * cw / a0,
            (1.0 - alpha) / a0};
}

void filter_inplace(const Biquad& f, std::vector<double>& x) {
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
    for (double& v : x) {
        const double y = f.b0 * v + f.b1 * x1 + f.b2 * x2 - f.a1 * y1 - f.a2 * y2;
        x2 = x1;
        x1 = v;
        y2 = y1;
        y1 = y;
        v = y;
    }
}

}  // namespace

std::vector<double> lowpass_decimate(const std::vector<double>& raw, double source_hz,
                                     double target_hz, double lowpass_hz) {
    if (raw.empty()) throw InvalidInputError("lowpass_decimate: empty input");
    if (!(source_hz > 0.0) || !(target_hz > 0.0) || !(lowpass_hz > 0.0))
        throw InvalidConfigError("rates must be positive");
    const double ratio = source_hz / target_hz;
    const auto factor = static_cast<std::int64_t>(std::llround(ratio));
    if (factor < 1 || std::abs(ratio - static_cast<double>(factor)) > 1e-9)
        throw InvalidConfigError("source rate must be an integer multiple of the target rate");
    if (!(lowpass_hz < source_hz / 2.0))
        throw InvalidConfigError("low-pass cutoff must be below the source Nyquist rate");

    // Fourth-order Butterworth as two cascaded sections.
    const Biquad sections[2] = {lowpass_biquad(lowpass_hz, source_hz, 0.54119610014619698),
                                lowpass_biquad(lowpass_hz, source_hz, 1.3065629648763764)};

    // Odd-reflection padding keeps the forward-backward transients off the data.
    const std::size_t n = raw.size();
    const std::size_t pad =
        std::min(n - 1, static_cast<std::size_t>(3.0 * source_hz / lowpass_hz));
    std::vector<double> work;
    work.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) work.push_back(2.0 * raw.front() - raw[i]);
    work.insert(work.end(), raw.begin(), raw.end());
    for (std::size_t i = 1; i <= pad; ++i) work.push_back(2.0 * raw.back() - raw[n - 1 - i]);

    for (const auto& s : sections) filter_inplace(s, work);
    std::reverse(work.begin(), work.end());
    for (const auto& s : sections) filter_inplace(s, work);
    std::reverse(work.begin(), work.end());

    std::vector<double> out;
    out.reserve(n / static_cast<std::size_t>(factor) + 1);
    for (std::size_t i = pad; i < pad + n; i += static_cast<std::size_t>(factor))
        out.push_back(work[i]);
    return out;
}

std::vector<double> znormalize(const std::vector<double>& x) {
    if (x.empty()) throw InvalidInputError("znormalize: empty input");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size());
    const double sd = std::sqrt(var);
    if (!(sd > 1e-12)) throw DegenerateInputError("znormalize: zero-variance input");
    std::vector<double> out;
    out.reserve(x.size());
    for (double v : x) out.push_back((v - mean) / sd);
    return out;
}

std::vector<double> preprocess_eeg(const std::vector<double>& raw, double source_hz,
                                   double target_hz, double lowpass_hz) {
    return znormalize(lowpass_decimate(raw, source_hz, target_hz, lowpass_hz));
}

ArFit fit_ar(const std::vector<double>& train, int order) {
    if (order < 1) throw InvalidInputError("fit_ar: order must be at least 1");
    const auto n = static_cast<std::int64_t>(train.size());
    if (n <= 10 * order) throw InvalidInputError("fit_ar: training series too short");

    const auto p = static_cast<std::size_t>(order);
    std::vector<double> xtx(p * p, 0.0);
    std::vector<double> xty(p, 0.0);
    for (std::int64_t t = order; t < n; ++t) {
        for (std::size_t i = 0; i < p; ++i) {
            const double xi = train[static_cast<std::size_t>(t) - 1 - i];
            xty[i] += xi * train[static_cast<std::size_t>(t)];
            for (std::size_t j = i; j < p; ++j)
                xtx[i * p + j] += xi * train[static_cast<std::size_t>(t) - 1 - j];
        }
    }
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < i; ++j) xtx[i * p + j] = xtx[j * p + i];

    // Gaussian elimination with partial pivoting.
    std::vector<double> a = xtx;
    std::vector<double> b = xty;
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::abs(a[r * p + col]) > std::abs(a[piv * p + col])) piv = r;
        if (std::abs(a[piv * p + col]) <= 1e-12 * std::max(scale, 1.0))
            throw SingularFitError("fit_ar: rank-deficient design matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < p; ++j) std::swap(a[piv * p + j], a[col * p + j]);
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < p; ++r) {
            const double f = a[r * p + col] / a[col * p + col];
            for (std::size_t j = col; j < p; ++j) a[r * p + j] -= f * a[col * p + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> alpha(p, 0.0);
    for (std::size_t ri = p; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t j = ri + 1; j < p; ++j) acc -= a[ri * p + j] * alpha[j];
        alpha[ri] = acc / a[ri * p + ri];
    }

    double ssr = 0.0;
    double sst = 0.0;
    std::int64_t rows = 0;
    for (std::int64_t t = order; t < n; ++t) {
        double pred = 0.0;
        for (std::size_t i = 0; i < p; ++i)
            pred += alpha[i] * train[static_cast<std::size_t>(t) - 1 - i];
        const double y = train[static_cast<std::size_t>(t)];
        ssr += (y - pred) * (y - pred);
        sst += y * y;
        ++rows;
    }
    if (!(sst > 0.0)) throw SingularFitError("fit_ar: zero-energy training series");

    ArFit fit;
    fit.alpha = std::move(alpha);
    fit.log_sigma = 0.5 * std::log(ssr / static_cast<double>(rows));
    fit.r_squared = 1.0 - ssr / sst;
    return fit;
}

std::vector<StreamRecord> read_csv_stream(const std::string& path,
                                          const CsvColumnSpec& columns) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open '" + path + "'");
    const auto rows = csv::read_all(in);
    if (rows.empty()) throw CsvError("empty file '" + path + "'");

    const auto& header = rows.front();
    auto find = [&](const std::string& name) -> std::ptrdiff_t {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : it - header.begin();
    };
    const auto xi = find(columns.x);
    if (xi < 0) throw CsvError("missing column '" + columns.x + "' in '" + path + "'");
    const auto ti = find(columns.t);
    const auto mi = find(columns.mu_true);
    const auto si = find(columns.state_true);
    const auto ni = find(columns.nu_true);

    if (rows.size() == 1) throw CsvError("no data rows in '" + path + "'");

    std::vector<StreamRecord> out;
    out.reserve(rows.size() - 1);
    std::int64_t prev_t = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::size_t data_row = r;  // 1-based data row number
        const auto& row = rows[r];
        auto cell = [&](std::ptrdiff_t idx) -> const std::string& {
            if (idx < 0 || static_cast<std::size_t>(idx) >= row.size())
                throw CsvError(data_row, "missing field");
            return row[static_cast<std::size_t>(idx)];
        };
        StreamRecord rec;
        rec.x = parse_double(cell(xi), data_row, columns.x);
        rec.t = ti >= 0 ? parse_int(cell(ti), data_row, columns.t)
                        : static_cast<std::int64_t>(data_row);
        if (!out.empty() && rec.t <= prev_t)
            throw CsvError(data_row, "time index must be strictly increasing");
        prev_t = rec.t;
        if (mi >= 0) rec.mu_true = parse_double(cell(mi), data_row, columns.mu_true);
        if (si >= 0)
            rec.state_true = static_cast<int>(parse_int(cell(si), data_row, columns.state_true));
        if (ni >= 0) rec.nu_true = parse_double(cell(ni), data_row, columns.nu_true);
        out.push_back(std::move(rec));
    }
    return out;
}

void write_stream_csv(const std::string& path, const std::vector<StreamRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CsvError("cannot write '" + path + "'");
    const bool truth = !records.empty() && records.front().mu_true.has_value();
    const bool states = !records.empty() && records.front().state_true.has_value();
    std::string header = "t,x";
    if (truth) header += ",mu_true";
    if (states) header += ",state_true,nu_true";
    out << header << "\n";
    for (const auto& r : records) {
        std::vector<std::string> fields{std::to_string(r.t), csv::format_double(r.x)};
        if (truth) fields.push_back(csv::format_double(r.mu_true.value_or(0.0)));
        if (states) {
            fields.push_back(std::to_string(r.state_true.value_or(0)));
            fields.push_back(csv::format_double(r.nu_true.value_or(0.0)));
        }
        out << csv::format_row(fields) << "\n";
    }
}

}  // namespace changedyn::data

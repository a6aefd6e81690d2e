#include "geq/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace geq {

namespace {

// Catmull-Rom value on a periodic uniform table.
double cr_value(const std::vector<double>& y, double u) {
    const int n = static_cast<int>(y.size());
    double s = wrap(u, 1.0) * n;
    int i = static_cast<int>(std::floor(s));
    if (i >= n) i = n - 1;
    double t = s - i;
    auto at = [&](int k) { return y[((k % n) + n) % n]; };
    double y0 = at(i - 1), y1 = at(i), y2 = at(i + 1), y3 = at(i + 2);
    return 0.5 * (2.0 * y1 + (-y0 + y2) * t + (2.0 * y0 - 5.0 * y1 + 4.0 * y2 - y3) * t * t +
                  (-y0 + 3.0 * y1 - 3.0 * y2 + y3) * t * t * t);
}

// Spectral derivative table of periodic samples (naive DFT; tables are small
// and this runs once per profile).
std::vector<double> spectral_derivative(const std::vector<double>& y) {
    const int n = static_cast<int>(y.size());
    std::vector<double> re(n, 0.0), im(n, 0.0);
    for (int m = 0; m < n; ++m) {
        double cr = 0.0, ci = 0.0;
        for (int k = 0; k < n; ++k) {
            double ang = -kTwoPi * m * k / n;
            cr += y[k] * std::cos(ang);
            ci += y[k] * std::sin(ang);
        }
        re[m] = cr;
        im[m] = ci;
    }
    std::vector<double> out(n, 0.0);
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m) {
            int mm = (m <= n / 2) ? m : m - n;
            if (2 * m == n) mm = 0;  // drop the unpaired Nyquist mode
            double w = kTwoPi * mm;
            double ang = kTwoPi * m * k / n;
            // Re[(i w) F_m e^{i ang}] / n
            acc += w * (-im[m] * std::cos(ang) - re[m] * std::sin(ang)) / n;
        }
        out[k] = acc;
    }
    return out;
}

std::vector<double> read_column_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile csv: " + path);
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        double v;
        if (!(ss >> v)) throw ConfigError("malformed profile csv line: " + line);
        vals.push_back(v);
    }
    if (vals.size() < 4) throw ConfigError("profile csv needs at least 4 samples: " + path);
    return vals;
}

}  // namespace

Profile Profile::harmonic(double amplitude, int frequency, double offset, double phase) {
    Profile p;
    p.kind_ = Kind::Harmonic;
    p.amp_ = amplitude;
    p.freq_ = frequency;
    p.offset_ = offset;
    p.phase_ = phase;
    p.id_ = "sin:" + format_double(amplitude) + ":" + std::to_string(frequency);
    return p;
}

Profile Profile::constant(double c) {
    Profile p;
    p.kind_ = Kind::Constant;
    p.offset_ = c;
    p.id_ = "const:" + format_double(c);
    return p;
}

Profile Profile::from_samples(std::vector<double> samples) {
    Profile p;
    p.kind_ = Kind::Samples;
    p.samples_ = std::move(samples);
    p.dsamples_ = spectral_derivative(p.samples_);
    p.id_ = "samples:" + std::to_string(p.samples_.size());
    return p;
}

Profile Profile::from_csv(const std::string& path) {
    Profile p = from_samples(read_column_csv(path));
    p.id_ = "csv:" + path;
    return p;
}

Profile Profile::parse(const std::string& id) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : id) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    const std::string& head = parts[0];
    auto num = [&](size_t i, double dflt) {
        return parts.size() > i && !parts[i].empty() ? std::stod(parts[i]) : dflt;
    };
    if (head == "sin" || head == "cos") {
        double amp = num(1, 1.0);
        int freq = static_cast<int>(num(2, 1.0));
        if (freq < 1) throw ConfigError("profile frequency must be >= 1: " + id);
        double phase = (head == "cos") ? 0.25 * kTwoPi : 0.0;
        Profile p = harmonic(amp, freq, 0.0, phase);
        p.id_ = id;
        return p;
    }
    if (head == "const") return constant(num(1, 0.0));
    if (head == "csv") {
        if (parts.size() < 2) throw ConfigError("profile csv id needs a path");
        return from_csv(id.substr(4));
    }
    throw ConfigError("unknown profile id: " + id);
}

double Profile::value(double u) const {
    switch (kind_) {
        case Kind::Harmonic:
            return offset_ + amp_ * std::sin(kTwoPi * freq_ * u + phase_);
        case Kind::Constant:
            return offset_;
        case Kind::Samples:
            return cr_value(samples_, u);
    }
    return 0.0;
}

double Profile::deriv(double u) const {
    switch (kind_) {
        case Kind::Harmonic:
            return amp_ * kTwoPi * freq_ * std::cos(kTwoPi * freq_ * u + phase_);
        case Kind::Constant:
            return 0.0;
        case Kind::Samples:
            return cr_value(dsamples_, u);
    }
    return 0.0;
}

Profile Profile::replicated(int m) const {
    if (m < 1) throw ConfigError("replication factor must be >= 1");
    if (m == 1) return *this;
    Profile p = *this;
    switch (kind_) {
        case Kind::Harmonic:
            p.freq_ *= m;
            break;
        case Kind::Constant:
            break;
        case Kind::Samples: {
            const int n = static_cast<int>(samples_.size());
            std::vector<double> rep(static_cast<std::size_t>(n) * m);
            for (std::size_t j = 0; j < rep.size(); ++j) rep[j] = samples_[j % n];
            p.samples_ = std::move(rep);
            p.dsamples_.resize(p.samples_.size());
            for (std::size_t j = 0; j < p.samples_.size(); ++j)
                p.dsamples_[j] = m * dsamples_[j % n];
            break;
        }
    }
    p.id_ = id_ + ":x" + std::to_string(m);
    return p;
}

double Profile::max_value() const {
    if (kind_ == Kind::Harmonic) return offset_ + std::abs(amp_);
    if (kind_ == Kind::Constant) return offset_;
    int n = static_cast<int>(samples_.size()) * 8;
    double m = -1e300;
    for (int i = 0; i < n; ++i) m = std::max(m, value(static_cast<double>(i) / n));
    return m;
}

double Profile::min_value() const {
    if (kind_ == Kind::Harmonic) return offset_ - std::abs(amp_);
    if (kind_ == Kind::Constant) return offset_;
    int n = static_cast<int>(samples_.size()) * 8;
    double m = 1e300;
    for (int i = 0; i < n; ++i) m = std::min(m, value(static_cast<double>(i) / n));
    return m;
}

double Profile::interp(const std::vector<double>& tab, double u) const { return cr_value(tab, u); }

Profile2D Profile2D::cosine_pair(double amplitude, double offset) {
    Profile2D p;
    p.kind_ = Kind::CosinePair;
    p.amp_ = amplitude;
    p.offset_ = offset;
    p.id_ = "coscos:" + format_double(amplitude) + ":" + format_double(offset);
    return p;
}

Profile2D Profile2D::from_samples(std::vector<double> samples, int n) {
    if (static_cast<int>(samples.size()) != n * n)
        throw ConfigError("profile2d samples must form an n x n grid");
    Profile2D p;
    p.kind_ = Kind::Samples;
    p.samples_ = std::move(samples);
    p.n_ = n;
    p.id_ = "samples2d:" + std::to_string(n);
    return p;
}

Profile2D Profile2D::parse(const std::string& id) {
    if (id.rfind("coscos", 0) == 0) {
        double amp = 1.0, off = -1.0;
        if (id.size() > 6) {
            std::string rest = id.substr(7);
            auto colon = rest.find(':');
            amp = std::stod(rest.substr(0, colon));
            if (colon != std::string::npos) off = std::stod(rest.substr(colon + 1));
        }
        Profile2D p = cosine_pair(amp, off);
        p.id_ = id;
        return p;
    }
    if (id.rfind("csv:", 0) == 0) {
        auto vals = read_column_csv(id.substr(4));
        int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(vals.size()))));
        if (n * n != static_cast<int>(vals.size()))
            throw ConfigError("profile2d csv must hold a square sample grid");
        Profile2D p = from_samples(std::move(vals), n);
        p.id_ = id;
        return p;
    }
    throw ConfigError("unknown profile2d id: " + id);
}

double Profile2D::value(double u1, double u2) const {
    if (kind_ == Kind::CosinePair)
        return offset_ + 0.5 * amp_ * (std::cos(kTwoPi * u1) + std::cos(kTwoPi * u2));
    // bicubic: Catmull-Rom across rows, then across the resulting column
    double s = wrap(u2, 1.0) * n_;
    int j = static_cast<int>(std::floor(s));
    if (j >= n_) j = n_ - 1;
    std::vector<double> col(4);
    for (int k = 0; k < 4; ++k) {
        int jj = ((j - 1 + k) % n_ + n_) % n_;
        std::vector<double> row(samples_.begin() + static_cast<size_t>(jj) * n_,
                                samples_.begin() + static_cast<size_t>(jj + 1) * n_);
        col[k] = cr_value(row, u1);
    }
    double t = s - j;
    double y0 = col[0], y1 = col[1], y2 = col[2], y3 = col[3];
    return 0.5 * (2.0 * y1 + (-y0 + y2) * t + (2.0 * y0 - 5.0 * y1 + 4.0 * y2 - y3) * t * t +
                  (-y0 + 3.0 * y1 - 3.0 * y2 + y3) * t * t * t);
}

Vec Profile2D::gradient(double u1, double u2) const {
    if (kind_ == Kind::CosinePair) {
        return {-0.5 * amp_ * kTwoPi * std::sin(kTwoPi * u1),
                -0.5 * amp_ * kTwoPi * std::sin(kTwoPi * u2), 0.0};
    }
    const double du = 1.0 / (8.0 * n_);
    return {(value(u1 + du, u2) - value(u1 - du, u2)) / (2.0 * du),
            (value(u1, u2 + du) - value(u1, u2 - du)) / (2.0 * du), 0.0};
}

double Profile2D::max_value() const {
    if (kind_ == Kind::CosinePair) return offset_ + amp_;
    double m = -1e300;
    int n = n_ * 4;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            m = std::max(m, value(static_cast<double>(i) / n, static_cast<double>(j) / n));
    return m;
}

}  // namespace geq

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "geq/common.hpp"

namespace geq {

// Periodic scalar profile of one variable, stored on the unit period [0,1).
// Analytic kinds keep exact derivatives; sampled kinds use C1 periodic cubic
// interpolation with a spectrally differentiated derivative table.
class Profile {
  public:
    static Profile harmonic(double amplitude, int frequency, double offset = 0.0,
                            double phase = 0.0);
    static Profile constant(double c);
    static Profile from_samples(std::vector<double> samples);
    static Profile from_csv(const std::string& path);
    // "sin", "sin:<amp>", "sin:<amp>:<freq>", "cos[:...]", "const:<c>", "csv:<path>"
    static Profile parse(const std::string& id);

    double value(double u) const;  // u in unit-period coordinates
    double deriv(double u) const;  // d/du on the unit period
    Profile replicated(int m) const;  // u -> f(m u mod 1), m copies per period
    double max_value() const;
    double min_value() const;
    bool is_constant() const { return kind_ == Kind::Constant; }
    const std::string& id() const { return id_; }

  private:
    enum class Kind { Harmonic, Constant, Samples };
    Kind kind_ = Kind::Constant;
    double amp_ = 0.0, offset_ = 0.0, phase_ = 0.0;
    int freq_ = 1;
    std::vector<double> samples_;
    std::vector<double> dsamples_;
    std::string id_ = "const:0";

    double interp(const std::vector<double>& tab, double u) const;
};

// Periodic scalar of two variables on [0,1)^2; used by 3D shear flows.
// Analytic catalog entries cover the bifurcation study; sampled grids use
// bicubic periodic interpolation.
class Profile2D {
  public:
    // f(x') = offset + amp*(cos(2 pi u1) + cos(2 pi u2))/2
    static Profile2D cosine_pair(double amplitude, double offset);
    static Profile2D from_samples(std::vector<double> samples, int n);
    // "coscos" (= (cos x1 + cos x2)/2 - 1), "coscos:<amp>:<offset>", "csv:<path>"
    static Profile2D parse(const std::string& id);

    double value(double u1, double u2) const;
    Vec gradient(double u1, double u2) const;  // d/du components in slots 0,1
    double max_value() const;
    const std::string& id() const { return id_; }

  private:
    enum class Kind { CosinePair, Samples };
    Kind kind_ = Kind::CosinePair;
    double amp_ = 1.0, offset_ = 0.0;
    std::vector<double> samples_;
    int n_ = 0;
    std::string id_ = "coscos";
};

}  // namespace geq

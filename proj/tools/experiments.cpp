#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "squeezelab/decoherence.hpp"
#include "squeezelab/detection.hpp"
#include "squeezelab/errors.hpp"
#include "squeezelab/gaussian_state.hpp"
#include "squeezelab/interferometer.hpp"
#include "squeezelab/opo.hpp"
#include "squeezelab/random.hpp"
#include "squeezelab/spectrum.hpp"
#include "squeezelab/version.hpp"

namespace squeezelab::cli {
namespace {

constexpr double kPlanck = 6.62607015e-34;
constexpr double kSpeedOfLight = 299792458.0;

const char* extension(OutputFormat format) {
  return format == OutputFormat::kCsv ? "csv" : "json";
}

// Typed, strict access to resolved parameters.
class Params {
 public:
  Params(const Json& values, std::string experiment)
      : values_(values), experiment_(std::move(experiment)) {}

  double number(const char* key) const {
    const Json& v = at(key);
    if (!v.is_number()) fail(key, "a number");
    return v.get<double>();
  }
  std::int64_t integer(const char* key) const {
    const Json& v = at(key);
    if (!v.is_number_integer()) fail(key, "an integer");
    return v.get<std::int64_t>();
  }
  std::string text(const char* key) const {
    const Json& v = at(key);
    if (!v.is_string()) fail(key, "a string");
    return v.get<std::string>();
  }
  bool is_null(const char* key) const { return at(key).is_null(); }
  const Json& raw(const char* key) const { return at(key); }

 private:
  const Json& at(const char* key) const {
    if (!values_.contains(key)) {
      throw ConfigError("missing parameter '" + std::string(key) + "'");
    }
    return values_.at(key);
  }
  [[noreturn]] void fail(const char* key, const char* what) const {
    throw ConfigError("parameter '" + std::string(key) + "' of experiment '" +
                      experiment_ + "' must be " + what);
  }

  const Json& values_;
  std::string experiment_;
};

std::vector<double> frequency_grid(double lo, double hi, std::int64_t points,
                                   const std::string& spacing) {
  detail::require(points >= 1, "points must be >= 1");
  detail::require(hi >= lo, "f_max must be >= f_min");
  std::vector<double> f(static_cast<std::size_t>(points));
  if (points == 1) {
    f[0] = lo;
    return f;
  }
  if (spacing == "log") {
    detail::require(lo > 0.0, "log spacing needs f_min > 0");
    for (std::int64_t i = 0; i < points; ++i) {
      f[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    }
  } else if (spacing == "linear") {
    for (std::int64_t i = 0; i < points; ++i) {
      f[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    }
  } else {
    throw ConfigError("spacing must be \"linear\" or \"log\"");
  }
  return f;
}

std::uint64_t require_seed(const ExperimentConfig& config) {
  if (!config.seed) {
    throw ConfigError("experiment '" + config.experiment +
                      "' is stochastic and needs a \"seed\"");
  }
  return *config.seed;
}

int thread_count(const Params& p) {
  const auto threads = p.integer("threads");
  detail::require(threads >= 1 && threads <= 1024, "threads must lie in [1, 1024]");
  return static_cast<int>(threads);
}

// --- experiments ---------------------------------------------------------

Table opo_spectrum_experiment(const ExperimentConfig&, const Params& p) {
  OpoParams opo;
  opo.pump_ratio = pump_ratio_from_gain(p.number("gain"));
  opo.escape_efficiency = p.number("escape_efficiency");
  opo.half_linewidth = p.number("half_linewidth");
  const auto f = frequency_grid(p.number("f_min"), p.number("f_max"),
                                p.integer("points"), p.text("spacing"));
  const auto spectrum = opo_spectrum(opo, f);

  Table t;
  t.metadata["pump_ratio"] = opo.pump_ratio;
  std::vector<double> vs, va, ds, da;
  for (const auto& point : spectrum) {
    vs.push_back(point.v_squeeze);
    va.push_back(point.v_antisqueeze);
    ds.push_back(db_from_variance(point.v_squeeze));
    da.push_back(db_from_variance(point.v_antisqueeze));
  }
  t.add_column("frequency", f);
  t.add_column("v_squeeze", std::move(vs));
  t.add_column("v_antisqueeze", std::move(va));
  t.add_column("squeeze_db", std::move(ds));
  t.add_column("antisqueeze_db", std::move(da));
  return t;
}

DecoherenceModel decoherence_model(const Params& p) {
  DecoherenceModel m;
  m.gain = p.number("gain");
  m.intrinsic_loss = p.number("intrinsic_loss");
  m.phase_noise = PhaseNoise::from_degrees(p.number("phase_noise_deg"));
  m.omega = p.number("omega");
  m.gamma = p.number("gamma");
  return m;
}

Table decohere_experiment(const ExperimentConfig&, const Params& p) {
  const DecoherenceModel model = decoherence_model(p);
  const auto loss = frequency_grid(0.0, p.number("added_loss_max"),
                                   p.integer("points"), "linear");
  Table t;
  std::vector<double> ds, da;
  for (double l : loss) {
    const SqueezeDb db = forward_model(model, l);
    ds.push_back(db.squeeze_db);
    da.push_back(db.antisqueeze_db);
  }
  t.add_column("added_loss", loss);
  t.add_column("squeeze_db", std::move(ds));
  t.add_column("antisqueeze_db", std::move(da));
  return t;
}

std::vector<SqueezeMeasurement> parse_measurements(const Json& list,
                                                   const std::string& where) {
  if (!list.is_array()) throw ConfigError(where + ": measurements must be an array");
  std::vector<SqueezeMeasurement> out;
  for (const auto& item : list) {
    if (!item.is_object()) throw ConfigError(where + ": measurement must be an object");
    for (const auto& [key, value] : item.items()) {
      if (key != "added_loss" && key != "squeeze_db" && key != "antisqueeze_db") {
        throw ConfigError(where + ": unknown measurement key '" + key + "'");
      }
      if (!value.is_number()) {
        throw ConfigError(where + ": measurement field '" + key + "' must be a number");
      }
    }
    if (item.size() != 3) {
      throw ConfigError(where +
                        ": measurement needs added_loss, squeeze_db, antisqueeze_db");
    }
    out.push_back({item["added_loss"].get<double>(), item["squeeze_db"].get<double>(),
                   item["antisqueeze_db"].get<double>()});
  }
  return out;
}

std::vector<SqueezeMeasurement> load_measurements(const ExperimentConfig& config,
                                                  const Params& p) {
  const bool has_file = !p.is_null("data_file");
  const bool has_inline = !p.is_null("measurements");
  if (has_file == has_inline) {
    throw ConfigError("fit-loss needs exactly one of data_file or measurements");
  }
  if (has_inline) return parse_measurements(p.raw("measurements"), "measurements");

  std::filesystem::path path = p.text("data_file");
  if (path.is_relative()) path = config.base_dir / path;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data_file " + path.string());
  Json data;
  try {
    data = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!data.is_object() || !data.contains("measurements")) {
    throw ConfigError(path.string() + ": expected an object with \"measurements\"");
  }
  return parse_measurements(data["measurements"], path.string());
}

Table fit_loss_experiment(const ExperimentConfig& config, const Params& p) {
  const auto data = load_measurements(config, p);
  FitOptions options;
  options.gain = p.number("gain");
  options.omega = p.number("omega");
  options.gamma = p.number("gamma");
  options.threads = thread_count(p);
  if (!p.is_null("fixed_phase_noise_deg")) {
    options.fixed_phase_noise = PhaseNoise::from_degrees(p.number("fixed_phase_noise_deg"));
  }
  const FitResult fit = fit_loss_phase(data, options);
  if (!fit.converged) {
    std::cerr << "warning: fit did not converge after " << fit.iterations
              << " iterations\n";
  }

  Table t;
  t.metadata["data_points"] = data.size();
  t.metadata["mode"] = options.fixed_phase_noise ? "fixed-phase-noise" : "free";
  t.metadata["converged"] = fit.converged;
  t.add_column("intrinsic_loss", {fit.intrinsic_loss});
  t.add_column("phase_noise_deg", {fit.phase_noise.degrees()});
  t.add_column("residual", {fit.residual});
  t.add_column("converged", {fit.converged ? 1.0 : 0.0});
  t.add_column("iterations", {static_cast<double>(fit.iterations)});
  return t;
}

WindowShape window_shape(const std::string& name) {
  if (name == "gaussian") return WindowShape::kGaussian;
  if (name == "rectangular") return WindowShape::kRectangular;
  throw ConfigError("window_shape must be \"gaussian\" or \"rectangular\"");
}

Table photon_record_experiment(const ExperimentConfig& config, const Params& p) {
  const std::uint64_t seed = require_seed(config);
  MeasurementWindowing windowing;
  windowing.window = p.number("window");
  windowing.shape = window_shape(p.text("window_shape"));
  windowing.n_windows = p.integer("n_windows");

  LightSource source;
  source.wavelength = p.number("wavelength");
  source.coherence_time = p.number("coherence_time");
  double n_bar = 0.0;
  if (!p.is_null("power")) {
    source.power = p.number("power");
    n_bar = photons_per_window(source, windowing);
  } else {
    n_bar = p.number("mean_photons");
    detail::require(n_bar >= 0.0, "mean_photons must be >= 0");
    detail::require(windowing.window > 0.0, "measurement window must be > 0");
    if (n_bar > 0.0) {
      source.power = n_bar * kPlanck * kSpeedOfLight / source.wavelength /
                     windowing.window;
    }
  }

  const std::string kind = p.text("state");
  GaussianState state;
  if (kind == "coherent") {
    state = coherent(std::sqrt(n_bar), 0.0);
  } else if (kind == "amplitude-squeezed") {
    state = displace(squeeze(vacuum(), SqueezeSetting::from_db(p.number("squeeze_db"), 0.0)),
                     std::sqrt(n_bar), 0.0);
  } else {
    throw ConfigError("state must be \"coherent\" or \"amplitude-squeezed\"");
  }

  const PhotonRecord record =
      sample_photon_record(state, source, windowing, seed, thread_count(p));
  Table t = to_table(record);
  t.metadata["sample_mean"] = record.sample_mean();
  if (record.sample_mean() > 0.0 && record.counts.size() >= 2) {
    t.metadata["fano_factor"] = fano_factor(record);
  }
  return t;
}

DetectorParams detector_from(const Params& p) {
  DetectorParams det;
  det.quantum_efficiency = p.number("quantum_efficiency");
  det.visibility = p.number("visibility");
  det.dark_noise_variance = p.number("dark_noise_variance");
  det.lo_technical_noise = p.number("lo_technical_noise");
  det.balance_asymmetry = p.number("balance_asymmetry");
  det.sample_rate = p.number("sample_rate");
  return det;
}

Table bhd_psd_experiment(const ExperimentConfig& config, const Params& p) {
  const std::uint64_t seed = require_seed(config);
  const DetectorParams det = detector_from(p);
  const int threads = thread_count(p);
  const double v_squeeze = variance_from_db(-p.number("squeeze_db"));
  const double v_anti = p.is_null("antisqueeze_db")
                            ? 1.0 / v_squeeze
                            : variance_from_db(p.number("antisqueeze_db"));
  const GaussianState signal = spectrum_to_state({0.0, v_squeeze, v_anti}, 0.0);
  const double lo_phase = p.number("lo_phase");
  const auto n = p.integer("n_samples");
  const double rbw = p.number("resolution_bandwidth");

  const TimeSeries series = bhd_series(signal, lo_phase, 0.0, det, n, seed, threads);
  // Shot-noise reference: the same detector with the signal port blocked.
  const TimeSeries shot =
      bhd_series(vacuum(), lo_phase, 0.0, det, n, substream_seed(seed, 1), threads);
  const NoiseSpectrum spectrum = welch_psd(series, rbw);
  const NoiseSpectrum calibration = welch_psd(shot, rbw);
  const NoiseSpectrum relative = relative_to(spectrum, calibration);

  Table t = to_table(spectrum);
  t.metadata["sample_variance"] = series.variance();
  std::vector<double> rel_db(relative.psd.size());
  for (std::size_t k = 0; k < rel_db.size(); ++k) {
    rel_db[k] = db_from_variance(relative.psd[k]);
  }
  t.add_column("shot_calibration", calibration.psd);
  t.add_column("relative_db", std::move(rel_db));
  return t;
}

Table snr_equivalence_experiment(const ExperimentConfig& config, const Params& p) {
  const std::uint64_t seed = require_seed(config);
  const int threads = thread_count(p);
  const double squeeze_db = p.number("squeeze_db");
  const double n_bar = p.number("carrier_photons");
  const double index = p.number("modulation_index");
  const auto n = p.integer("n_samples");
  const double rbw = p.number("resolution_bandwidth");
  DetectorParams det;
  det.sample_rate = p.number("sample_rate");
  LightSource source;
  source.coherence_time = 1.0;

  struct Case {
    const char* name;
    double photons;
    double squeeze_db;
  };
  const Case cases[] = {{"coherent", n_bar, 0.0},
                        {"squeezed", n_bar, squeeze_db},
                        {"double-power", 2.0 * n_bar, 0.0}};

  Table t;
  std::vector<double> photons, sq, floors, snrs;
  double f_signal = 0.0;
  for (std::size_t i = 0; i < std::size(cases); ++i) {
    const Case& c = cases[i];
    const GaussianState state = displace(
        squeeze(vacuum(), SqueezeSetting::from_db(c.squeeze_db, 0.0)),
        std::sqrt(c.photons), 0.0);
    TimeSeries ts = single_pd_series(state, source, det, n,
                                     substream_seed(seed, i), threads);
    // Snap the tone onto a bin centre of the estimator.
    const double bin_width = det.sample_rate /
                             std::llround(det.sample_rate / rbw);
    f_signal = std::round(p.number("f_signal") / bin_width) * bin_width;
    // A relative amplitude modulation m of a carrier with amplitude-quadrature
    // mean 2|alpha| shows up as 2 m |alpha| in shot-noise units.
    ts = add_signal_modulation(ts, f_signal, 2.0 * index * std::sqrt(c.photons));
    const NoiseSpectrum spectrum = welch_psd(ts, rbw);
    const std::size_t bin = nearest_bin(spectrum, f_signal);
    photons.push_back(c.photons);
    sq.push_back(c.squeeze_db);
    floors.push_back(noise_floor(spectrum, bin));
    snrs.push_back(signal_to_noise(spectrum, f_signal));
    t.metadata[std::string("case_") + std::to_string(i)] = c.name;
  }
  t.metadata["f_signal"] = f_signal;
  t.metadata["snr_gain_squeezed"] = snrs[1] / snrs[0];
  t.metadata["snr_gain_double_power"] = snrs[2] / snrs[0];
  t.metadata["predicted_power_gain"] = snr_equivalent_power_gain(squeeze_db);
  t.add_column("carrier_photons", std::move(photons));
  t.add_column("squeeze_db", std::move(sq));
  t.add_column("noise_floor", std::move(floors));
  t.add_column("snr", std::move(snrs));
  return t;
}

double squeeze_angle(const Json& value) {
  if (value.is_number()) return value.get<double>();
  if (value == "shot") return kShotNoiseSqueezeAngle;
  if (value == "rpn") return kRadiationPressureSqueezeAngle;
  throw ConfigError("squeeze_angle must be radians, \"shot\" or \"rpn\"");
}

Table noise_budget_experiment(const ExperimentConfig&, const Params& p) {
  IfoConfig cfg;
  cfg.arm_power = p.number("arm_power");
  cfg.mirror_mass = p.number("mirror_mass");
  cfg.arm_length = p.number("arm_length");
  cfg.wavelength = p.number("wavelength");
  cfg.detection_efficiency = p.number("detection_efficiency");
  cfg.injection_loss = p.number("injection_loss");
  cfg.sql_scale = p.number("sql_scale");
  cfg.injected_squeeze =
      SqueezeSetting::from_db(p.number("squeeze_db"), squeeze_angle(p.raw("squeeze_angle")));
  cfg.validate();

  const Json& fc = p.raw("filter_cavity");
  if (fc == "matched") {
    cfg.filter_cavity = matched_filter_cavity(cfg);
  } else if (fc.is_object()) {
    FilterCavityParams params;
    for (const auto& [key, value] : fc.items()) {
      if (!value.is_number()) throw ConfigError("filter_cavity." + key + " must be a number");
      if (key == "half_linewidth") params.half_linewidth = value.get<double>();
      else if (key == "detuning") params.detuning = value.get<double>();
      else throw ConfigError("unknown filter_cavity key '" + key + "'");
    }
    cfg.filter_cavity = params;
  } else if (!fc.is_null()) {
    throw ConfigError("filter_cavity must be null, \"matched\" or an object");
  }

  auto f = frequency_grid(p.number("f_min"), p.number("f_max"), p.integer("points"),
                          "log");
  const double crossing = sql_crossing_frequency(cfg);
  if (p.raw("include_crossing") == true && crossing > f.front() && crossing < f.back()) {
    const auto it = std::lower_bound(f.begin(), f.end(), crossing);
    if (*it != crossing) f.insert(it, crossing);
  }
  const BudgetCurve curve = quantum_noise_budget(cfg, f);

  Table t = to_table(curve);
  double min_ratio = std::numeric_limits<double>::infinity();
  double at = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double ratio = curve.total[i] / curve.sql[i];
    if (ratio < min_ratio) min_ratio = ratio, at = f[i];
  }
  t.metadata["sql_crossing_frequency"] = crossing;
  t.metadata["min_total_over_sql"] = min_ratio;
  t.metadata["min_total_over_sql_frequency"] = at;
  if (cfg.filter_cavity) {
    t.metadata["filter_cavity"] = {{"half_linewidth", cfg.filter_cavity->half_linewidth},
                                   {"detuning", cfg.filter_cavity->detuning}};
  }
  return t;
}

using Runner = Table (*)(const ExperimentConfig&, const Params&);

struct Registered {
  ExperimentInfo info;
  Runner runner;
};

const std::vector<Registered>& registry() {
  static const std::vector<Registered> entries = {
      {{"opo-spectrum", "Fig. 3",
        "squeeze and anti-squeeze spectra of a below-threshold squeezing resonator",
        false,
        {{"gain", 63.0, "parametric gain 1/(1-x)^2"},
         {"escape_efficiency", 1.0, "escape efficiency of the resonator"},
         {"half_linewidth", 1e7, "resonator half linewidth [Hz]"},
         {"f_min", 0.0, "first sideband frequency [Hz]"},
         {"f_max", 5e7, "last sideband frequency [Hz]"},
         {"points", 101, "number of frequencies"},
         {"spacing", "linear", "\"linear\" or \"log\""}}},
       opo_spectrum_experiment},
      {{"decohere", "Fig. 6",
        "squeeze/anti-squeeze in dB versus added optical loss", false,
        {{"gain", 63.0, "parametric gain"},
         {"intrinsic_loss", 0.086, "loss already present in the setup"},
         {"phase_noise_deg", 0.0, "RMS quadrature-angle jitter [deg]"},
         {"omega", 0.0, "sideband frequency [Hz]"},
         {"gamma", 1e7, "resonator half linewidth [Hz]"},
         {"added_loss_max", 0.9, "largest added loss"},
         {"points", 19, "number of added-loss values from 0"}}},
       decohere_experiment},
      {{"fit-loss", "Fig. 6",
        "fit intrinsic loss and phase noise to squeeze/anti-squeeze data", false,
        {{"data_file", nullptr, "JSON file with a \"measurements\" array"},
         {"measurements", nullptr,
          "inline array of {added_loss, squeeze_db, antisqueeze_db}"},
         {"gain", 63.0, "parametric gain, held fixed"},
         {"omega", 0.0, "sideband frequency [Hz]"},
         {"gamma", 1e7, "resonator half linewidth [Hz]"},
         {"fixed_phase_noise_deg", nullptr, "hold the phase noise at this value"},
         {"threads", 1, "worker threads for the grid stage"}}},
       fit_loss_experiment},
      {{"photon-record", "Fig. 2",
        "photon counts of short measurement windows and their Fano factor", true,
        {{"state", "coherent", "\"coherent\" or \"amplitude-squeezed\""},
         {"mean_photons", 1000.0, "photons per window (ignored if power is set)"},
         {"power", nullptr, "beam power [W]; sets the photons per window"},
         {"squeeze_db", 10.0, "amplitude squeezing [dB]"},
         {"n_windows", 100000, "number of windows"},
         {"window", 1e-6, "window length [s]"},
         {"window_shape", "gaussian", "\"gaussian\" or \"rectangular\""},
         {"coherence_time", 1e-3, "coherence time of the source [s]"},
         {"wavelength", 1064e-9, "wavelength [m]"},
         {"threads", 1, "worker threads"}}},
       photon_record_experiment},
      {{"bhd-psd", "Fig. 4",
        "balanced-homodyne noise spectrum of squeezed vacuum relative to shot noise",
        true,
        {{"squeeze_db", 10.0, "squeezing of the signal [dB]"},
         {"antisqueeze_db", nullptr, "anti-squeezing [dB]; null for a pure state"},
         {"lo_phase", 0.0, "local-oscillator phase [rad]"},
         {"quantum_efficiency", 0.995, "photodiode quantum efficiency"},
         {"visibility", 0.99, "fringe visibility with the local oscillator"},
         {"dark_noise_variance", 0.0, "electronic noise relative to shot noise"},
         {"lo_technical_noise", 0.0, "classical LO noise relative to shot noise"},
         {"balance_asymmetry", 0.0, "splitter deviation from 50/50"},
         {"sample_rate", 1e6, "sample rate [Hz]"},
         {"n_samples", 1 << 21, "number of samples"},
         {"resolution_bandwidth", 31250.0, "Welch resolution bandwidth [Hz]"},
         {"threads", 1, "worker threads"}}},
       bhd_psd_experiment},
      {{"snr-equivalence", "Fig. 1(a)",
        "signal-to-noise of squeezed light versus a coherent beam of doubled power",
        true,
        {{"squeeze_db", 3.0103, "amplitude squeezing [dB]"},
         {"carrier_photons", 1e4, "carrier photons per sample"},
         {"modulation_index", 1e-2, "relative amplitude modulation depth"},
         {"f_signal", 1e5, "modulation frequency [Hz]"},
         {"sample_rate", 1e6, "sample rate [Hz]"},
         {"n_samples", 1 << 20, "samples per case"},
         {"resolution_bandwidth", 3906.25, "Welch resolution bandwidth [Hz]"},
         {"threads", 1, "worker threads"}}},
       snr_equivalence_experiment},
      {{"noise-budget", "Fig. 5",
        "quantum noise budget of a Michelson with squeezed injection", false,
        {{"arm_power", 8e5, "circulating arm power [W]"},
         {"mirror_mass", 40.0, "test-mass mass [kg]"},
         {"arm_length", 4000.0, "arm length [m]"},
         {"wavelength", 1064e-9, "laser wavelength [m]"},
         {"detection_efficiency", 1.0, "readout efficiency"},
         {"injection_loss", 0.0, "loss between squeezer and interferometer"},
         {"squeeze_db", 0.0, "injected squeezing [dB]"},
         {"squeeze_angle", "shot", "radians, \"shot\" or \"rpn\""},
         {"filter_cavity", nullptr,
          "null, \"matched\" or {half_linewidth, detuning} in Hz"},
         {"f_min", 1.0, "lowest frequency [Hz]"},
         {"f_max", 1e4, "highest frequency [Hz]"},
         {"points", 200, "log-spaced frequencies"},
         {"include_crossing", true, "add the kappa = 1 frequency to the grid"},
         {"sql_scale", 1.0, "overall PSD scale"}}},
       noise_budget_experiment},
  };
  return entries;
}

const Registered& find(const std::string& name) {
  for (const auto& entry : registry()) {
    if (entry.info.name == name) return entry;
  }
  throw ConfigError("unknown experiment '" + name + "' (see `squeezelab list`)");
}

std::string position_in(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return std::to_string(line) + ":" + std::to_string(column);
}

OutputFormat parse_format(const Json& value) {
  if (value == "csv") return OutputFormat::kCsv;
  if (value == "json") return OutputFormat::kJson;
  throw ConfigError("output_format must be \"csv\" or \"json\"");
}

std::uint64_t parse_seed(const Json& value) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer() && value.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(value.get<std::int64_t>());
  }
  throw ConfigError("seed must be a non-negative integer");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> out;
    for (const auto& entry : registry()) out.push_back(entry.info);
    return out;
  }();
  return infos;
}

std::string list_experiments() {
  std::ostringstream out;
  for (const auto& info : experiments()) {
    out << info.name << "  [" << info.figure << "]"
        << (info.stochastic ? "  (needs seed)" : "") << "\n    " << info.summary
        << "\n";
    for (const auto& param : info.parameters) {
      out << "    " << std::left << std::setw(24) << param.name << " "
          << std::setw(12) << param.default_value.dump() << " "
          << param.description << "\n";
    }
    out << "\n";
  }
  return out.str();
}

ExperimentConfig parse_config(const std::string& text, const std::string& source_name) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(source_name + ":" + position_in(text, e.byte) + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError(source_name + ": config must be a JSON object");

  ExperimentConfig config;
  bool has_experiment = false;
  for (const auto& [key, value] : root.items()) {
    if (key == "experiment") {
      if (!value.is_string()) throw ConfigError(source_name + ": experiment must be a string");
      config.experiment = value.get<std::string>();
      has_experiment = true;
    } else if (key == "parameters") {
      if (!value.is_object()) throw ConfigError(source_name + ": parameters must be an object");
      config.parameters = value;
    } else if (key == "seed") {
      if (!value.is_null()) config.seed = parse_seed(value);
    } else if (key == "output_path") {
      if (!value.is_string()) throw ConfigError(source_name + ": output_path must be a string");
      config.output_path = value.get<std::string>();
    } else if (key == "output_format") {
      config.output_format = parse_format(value);
    } else {
      throw ConfigError(source_name + ": unknown key '" + key + "'");
    }
  }
  if (!has_experiment) throw ConfigError(source_name + ": missing \"experiment\"");
  find(config.experiment);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  ExperimentConfig config = parse_config(buffer.str(), path.string());
  config.base_dir = path.has_parent_path() ? path.parent_path() : ".";
  return config;
}

void apply_override(ExperimentConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    value = text;
  }

  if (key == "experiment") {
    if (!value.is_string()) throw ConfigError("experiment must be a string");
    config.experiment = value.get<std::string>();
    find(config.experiment);
  } else if (key == "seed") {
    config.seed = parse_seed(value);
  } else if (key == "output_path") {
    config.output_path = text;
  } else if (key == "output_format") {
    config.output_format = parse_format(value);
  } else {
    Json* node = &config.parameters;
    std::string_view rest = key;
    while (true) {
      const auto dot = rest.find('.');
      const std::string part(rest.substr(0, dot));
      if (dot == std::string_view::npos) {
        (*node)[part] = value;
        break;
      }
      Json& child = (*node)[part];
      if (!child.is_object()) child = Json::object();
      node = &child;
      rest.remove_prefix(dot + 1);
    }
  }
}

Json resolve_parameters(const ExperimentConfig& config) {
  const ExperimentInfo& info = find(config.experiment).info;
  Json resolved = Json::object();
  for (const auto& param : info.parameters) resolved[param.name] = param.default_value;
  for (const auto& [key, value] : config.parameters.items()) {
    if (!resolved.contains(key)) {
      throw ConfigError("unknown parameter '" + key + "' for experiment '" +
                        config.experiment + "'");
    }
    const Json& def = resolved[key];
    if (def.is_number() && !value.is_number()) {
      throw ConfigError("parameter '" + key + "' must be a number");
    }
    if (def.is_number_integer() && !value.is_number_integer()) {
      throw ConfigError("parameter '" + key + "' must be an integer");
    }
    if (def.is_boolean() && !value.is_boolean()) {
      throw ConfigError("parameter '" + key + "' must be true or false");
    }
    resolved[key] = value;
  }
  return resolved;
}

Table compute(const ExperimentConfig& config, const Json& resolved) {
  const Registered& entry = find(config.experiment);
  return entry.runner(config, Params(resolved, config.experiment));
}

RunResult run(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  RunResult result;
  result.parameters = resolve_parameters(config);
  result.table = compute(config, result.parameters);

  std::filesystem::path data_path =
      config.output_path.empty()
          ? std::filesystem::path(config.experiment + "." + extension(config.output_format))
          : std::filesystem::path(config.output_path);
  if (data_path.is_relative()) data_path = out_dir / data_path;
  if (data_path.has_parent_path()) std::filesystem::create_directories(data_path.parent_path());

  const Json seed = config.seed ? Json(*config.seed) : Json(nullptr);
  {
    std::ofstream out(data_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + data_path.string());
    if (config.output_format == OutputFormat::kCsv) {
      Table annotated;
      annotated.metadata["experiment"] = config.experiment;
      annotated.metadata["seed"] = seed;
      annotated.metadata["version"] = kVersion;
      annotated.metadata["parameters"] = result.parameters;
      for (const auto& [k, v] : result.table.metadata.items()) annotated.metadata[k] = v;
      annotated.names = result.table.names;
      annotated.columns = result.table.columns;
      write_csv(out, annotated);
    } else {
      Json doc;
      doc["experiment"] = config.experiment;
      doc["seed"] = seed;
      doc["version"] = kVersion;
      doc["parameters"] = result.parameters;
      const Json body = to_json(result.table);
      doc["metadata"] = body["metadata"];
      doc["columns"] = body["columns"];
      out << doc.dump(2) << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + data_path.string());
  }
  result.outputs.push_back(data_path);

  result.manifest = data_path.parent_path() / (data_path.stem().string() + ".manifest.json");
  Json manifest;
  manifest["experiment"] = config.experiment;
  manifest["parameters"] = result.parameters;
  manifest["seed"] = seed;
  manifest["version"] = kVersion;
  manifest["outputs"] = Json::array({data_path.filename().string()});
  manifest["created"] = utc_timestamp();
  std::ofstream out(result.manifest, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + result.manifest.string());
  out << manifest.dump(2) << '\n';
  return result;
}

int run_main(const std::filesystem::path& config_path,
             const std::vector<std::string>& overrides,
             const std::filesystem::path& out_dir) {
  try {
    ExperimentConfig config = load_config(config_path);
    for (const auto& o : overrides) apply_override(config, o);
    const RunResult result = run(config, out_dir);
    for (const auto& path : result.outputs) std::cout << "wrote " << path.string() << "\n";
    std::cout << "wrote " << result.manifest.string() << "\n";
    return kSuccess;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidationError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace squeezelab::cli

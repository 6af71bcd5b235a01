#include "dsscn/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dsscn {

namespace {

constexpr char kStackMagic[8] = {'D', 'S', 'S', 'C', 'N', 'S', 'T', 'K'};
constexpr char kLayerMagic[8] = {'D', 'S', 'S', 'C', 'N', 'L', 'Y', 'R'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void raw(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void flag(bool v) { u64(v ? 1 : 0); }
  void str(const std::string& s) {
    u64(s.size());
    raw(s.data(), s.size());
  }
  void vec(const Eigen::VectorXd& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    raw(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
  }
  void mat(const Eigen::MatrixXd& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    raw(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void raw(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) throw std::runtime_error("snapshot: truncated stream");
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    raw(&v, sizeof v);
    return v;
  }
  double f64() {
    double v = 0;
    raw(&v, sizeof v);
    return v;
  }
  bool flag() { return u64() != 0; }
  std::string str() {
    std::string s(checked(u64()), '\0');
    raw(s.data(), s.size());
    return s;
  }
  Eigen::VectorXd vec() {
    Eigen::VectorXd v(static_cast<Eigen::Index>(checked(u64())));
    raw(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
    return v;
  }
  Eigen::MatrixXd mat() {
    const auto r = checked(u64());
    const auto c = checked(u64());
    Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    raw(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
    return m;
  }

 private:
  static std::uint64_t checked(std::uint64_t n) {
    if (n > (1ULL << 32)) throw std::runtime_error("snapshot: implausible size");
    return n;
  }
  std::istream& in_;
};

void write_header(Writer& w, const char (&magic)[8]) {
  w.raw(magic, sizeof magic);
  w.u64(kSnapshotVersion);
}

void read_header(Reader& r, const char (&magic)[8]) {
  char got[8];
  r.raw(got, sizeof got);
  if (std::memcmp(got, magic, sizeof got) != 0) throw std::runtime_error("snapshot: bad magic");
  const auto version = r.u64();
  if (version != kSnapshotVersion) {
    throw std::runtime_error("snapshot: unsupported version " + std::to_string(version));
  }
}

void write_escn_config(Writer& w, const EscnConfig& c) {
  w.f64(c.q);
  w.f64(c.omega);
  w.f64(c.rho_decay);
  w.f64(c.delta_c);
  w.f64(c.p_b);
  w.f64(c.theta_prune);
  w.u64(static_cast<std::uint64_t>(c.scn.t_max));
  w.vec(Eigen::Map<const Eigen::VectorXd>(c.scn.scopes.data(), static_cast<Eigen::Index>(c.scn.scopes.size())));
  w.f64(c.scn.r);
}

EscnConfig read_escn_config(Reader& r) {
  EscnConfig c;
  c.q = r.f64();
  c.omega = r.f64();
  c.rho_decay = r.f64();
  c.delta_c = r.f64();
  c.p_b = r.f64();
  c.theta_prune = r.f64();
  c.scn.t_max = static_cast<int>(r.u64());
  const Eigen::VectorXd scopes = r.vec();
  c.scn.scopes.assign(scopes.data(), scopes.data() + scopes.size());
  c.scn.r = r.f64();
  return c;
}

void write_layer_body(Writer& w, const EscnLayer& layer) {
  w.u64(layer.inputs());
  w.u64(layer.outputs());
  write_escn_config(w, layer.config());
  w.vec(layer.q());
  const DensityStats& d = layer.density();
  w.u64(d.count);
  w.vec(d.count > 0 ? d.mean : Eigen::VectorXd());
  w.f64(d.m2);
  w.u64(layer.size());
  for (const auto& node : layer.nodes()) {
    w.vec(node.geom.c_lower);
    w.vec(node.geom.c_upper);
    w.mat(node.geom.inv_cov);
    w.mat(node.W);
    w.mat(node.Omega);
    w.u64(node.birth_stamp);
  }
}

EscnLayer read_layer_body(Reader& r) {
  const auto n = r.u64();
  const auto m = r.u64();
  EscnLayer layer(n, m, read_escn_config(r));
  layer.set_q(r.vec());
  DensityStats& d = layer.density();
  d.count = r.u64();
  d.mean = r.vec();
  d.m2 = r.f64();
  const auto R = r.u64();
  if (R > (1ULL << 24)) throw std::runtime_error("snapshot: implausible node count");
  for (std::uint64_t i = 0; i < R; ++i) {
    HiddenNode node;
    node.geom.c_lower = r.vec();
    node.geom.c_upper = r.vec();
    node.geom.inv_cov = r.mat();
    node.W = r.mat();
    node.Omega = r.mat();
    node.birth_stamp = r.u64();
    layer.nodes().push_back(std::move(node));
  }
  return layer;
}

}  // namespace

void write_layer(std::ostream& out, const EscnLayer& layer) {
  Writer w(out);
  write_header(w, kLayerMagic);
  write_layer_body(w, layer);
}

EscnLayer read_layer(std::istream& in) {
  Reader r(in);
  read_header(r, kLayerMagic);
  return read_layer_body(r);
}

std::string serialize_layer(const EscnLayer& layer) {
  std::ostringstream out(std::ios::binary);
  write_layer(out, layer);
  return out.str();
}

EscnLayer deserialize_layer(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return read_layer(in);
}

void write_stack(std::ostream& out, const StackedNetwork& net) {
  Writer w(out);
  write_header(w, kStackMagic);
  const StackConfig& c = net.config();
  w.u64(net.inputs());
  w.u64(net.outputs());
  w.f64(c.alpha);
  w.f64(c.delta_merge);
  w.flag(c.feature_weighting);
  w.flag(c.layer_pruning);
  w.f64(c.tau_chunks);
  w.u64(c.history_chunks);
  w.f64(c.alpha_min_drift);
  w.f64(c.alpha_min_warning);
  write_escn_config(w, c.escn);

  w.u64(net.depth());
  for (const auto& link : net.links()) {
    write_layer_body(w, link.layer);
    w.mat(link.P);
    w.u64(link.birth_stamp);
  }
  w.vec(net.lambda());

  const FeatureWeighter& fw = net.weighter();
  w.u64(fw.count());
  w.vec(fw.mean());
  w.mat(fw.comoment());

  const DriftDetector& det = net.detector();
  w.f64(det.config().tau);
  w.flag(net.tau_fixed());
  w.u64(det.seen());
  w.u64(det.history().size());
  for (const auto& h : det.history()) {
    w.vec(Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size())));
  }

  const auto& buf = net.buffer();
  w.flag(buf.has_value());
  if (buf) {
    w.u64(buf->stamp);
    w.mat(buf->X);
    w.mat(*buf->Y);
  }

  std::ostringstream rng_state;
  rng_state << net.rng();
  w.str(rng_state.str());
}

StackedNetwork read_stack(std::istream& in) {
  Reader r(in);
  read_header(r, kStackMagic);
  const auto n = r.u64();
  const auto m = r.u64();
  StackConfig c;
  c.alpha = r.f64();
  c.delta_merge = r.f64();
  c.feature_weighting = r.flag();
  c.layer_pruning = r.flag();
  c.tau_chunks = r.f64();
  c.history_chunks = r.u64();
  c.alpha_min_drift = r.f64();
  c.alpha_min_warning = r.f64();
  c.escn = read_escn_config(r);

  StackedNetwork net(n, m, c, 0);
  const auto depth = r.u64();
  if (depth > (1ULL << 16)) throw std::runtime_error("snapshot: implausible depth");
  for (std::uint64_t d = 0; d < depth; ++d) {
    LayerLink link{read_layer_body(r), Eigen::MatrixXd(), 0};
    link.P = r.mat();
    link.birth_stamp = r.u64();
    net.links().push_back(std::move(link));
  }
  net.set_lambda(r.vec());

  const auto count = r.u64();
  Eigen::VectorXd mean = r.vec();
  Eigen::MatrixXd comoment = r.mat();
  net.weighter().restore(count, std::move(mean), std::move(comoment));

  DriftConfig dc = net.detector().config();
  dc.tau = r.f64();
  net.detector().set_config(dc);
  net.set_tau_fixed(r.flag());
  const auto seen = r.u64();
  const auto chunks = r.u64();
  std::vector<std::vector<double>> history;
  for (std::uint64_t i = 0; i < chunks; ++i) {
    const Eigen::VectorXd h = r.vec();
    history.emplace_back(h.data(), h.data() + h.size());
  }
  net.detector().restore(seen, std::move(history));

  if (r.flag()) {
    DataChunk buf;
    buf.stamp = r.u64();
    buf.X = r.mat();
    buf.Y = r.mat();
    net.buffer() = std::move(buf);
  }

  std::istringstream rng_state(r.str());
  rng_state >> net.rng();
  if (!rng_state) throw std::runtime_error("snapshot: bad random engine state");
  return net;
}

void save_stack(const StackedNetwork& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_stack(out, net);
  if (!out) throw std::runtime_error("failed writing " + path);
}

StackedNetwork load_stack(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_stack(in);
}

}  // namespace dsscn

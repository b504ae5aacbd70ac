#include "siphsim/workload.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "siphsim/errors.hpp"

namespace siphsim {

// Generated at configure time from data/models/*.txt.
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_model_texts();

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv: return "conv";
    case LayerKind::FC: return "fc";
    case LayerKind::Pool: return "pool";
    case LayerKind::DepthwiseConv: return "dwconv";
  }
  return "?";
}

const char* to_string(TransferClass cls) {
  switch (cls) {
    case TransferClass::WeightRead: return "weight_read";
    case TransferClass::ActivationRead: return "activation_read";
    case TransferClass::OutputWrite: return "output_write";
  }
  return "?";
}

void LayerSpec::validate() const {
  auto fail = [&](const std::string& why) { throw DimensionMismatch("layer '" + name + "': " + why); };
  if (h < 1 || w < 1 || c < 1 || kh < 1 || kw < 1 || cout < 1) fail("dimensions must be >= 1");
  if (stride < 1) fail("stride must be >= 1");
  if (bit_width < 1) fail("bit_width must be >= 1");
  if ((kind == LayerKind::Pool || kind == LayerKind::DepthwiseConv) && cout != c)
    fail("output channels must equal input channels");
  if (kind != LayerKind::FC && padding == Padding::Valid && (kh > h || kw > w)) fail("kernel exceeds input");
}

int LayerSpec::out_h() const {
  if (kind == LayerKind::FC) return 1;
  return padding == Padding::Same ? (h + stride - 1) / stride : (h - kh) / stride + 1;
}

int LayerSpec::out_w() const {
  if (kind == LayerKind::FC) return 1;
  return padding == Padding::Same ? (w + stride - 1) / stride : (w - kw) / stride + 1;
}

namespace {

std::uint64_t to_bytes(std::uint64_t elems, int bit_width) {
  return (elems * static_cast<std::uint64_t>(bit_width) + 7) / 8;
}

}  // namespace

LayerTraffic layer_traffic(const LayerSpec& l) {
  l.validate();
  using u64 = std::uint64_t;
  const u64 h = l.h, w = l.w, c = l.c, kh = l.kh, kw = l.kw, cout = l.cout;
  const u64 oh = static_cast<u64>(l.out_h()), ow = static_cast<u64>(l.out_w());

  u64 weights = 0;
  LayerTraffic t;
  switch (l.kind) {
    case LayerKind::Conv:
      weights = kh * kw * c * cout + cout;
      t.dot_length = kh * kw * c;
      t.dot_products = oh * ow * cout;
      break;
    case LayerKind::DepthwiseConv:
      weights = kh * kw * c + c;
      t.dot_length = kh * kw;
      t.dot_products = oh * ow * c;
      break;
    case LayerKind::FC:
      weights = h * w * c * cout + cout;
      t.dot_length = h * w * c;
      t.dot_products = cout;
      break;
    case LayerKind::Pool:
      break;
  }
  t.mac_count = t.dot_length * t.dot_products;
  t.weight_bytes = to_bytes(weights, l.bit_width);
  t.input_bytes = to_bytes(h * w * c, l.bit_width);
  t.output_bytes = to_bytes(oh * ow * cout, l.bit_width);
  return t;
}

std::uint64_t TrafficTrace::total_bytes() const {
  std::uint64_t total = 0;
  for (const auto& t : transfers) total += t.bytes;
  return total;
}

bool TrafficTrace::operator==(const TrafficTrace& o) const {
  auto same_transfer = [](const TransferRequest& a, const TransferRequest& b) {
    return a.index == b.index && a.src == b.src && a.dst == b.dst && a.bytes == b.bytes && a.cls == b.cls &&
           a.work == b.work;
  };
  auto same_work = [](const MacWork& a, const MacWork& b) {
    return a.layer == b.layer && a.group == b.group && a.chiplet == b.chiplet && a.memory == b.memory &&
           a.mac_count == b.mac_count && a.dot_length == b.dot_length && a.dot_products == b.dot_products;
  };
  return std::equal(transfers.begin(), transfers.end(), o.transfers.begin(), o.transfers.end(), same_transfer) &&
         std::equal(work.begin(), work.end(), o.work.begin(), o.work.end(), same_work);
}

TrafficTrace build_trace(const ExecutionPlan& plan, const ChipletPlatform& platform, std::uint64_t packet_bytes) {
  if (packet_bytes == 0) throw InvalidParams("packet_bytes must be >= 1");
  TrafficTrace trace;
  if (plan.slices.empty()) return trace;
  if (platform.memory_chiplets.empty()) throw InvalidPlatform("platform has no memory chiplet");

  auto emit = [&](ChipletId src, ChipletId dst, std::uint64_t bytes, TransferClass cls, std::size_t work) {
    while (bytes > 0) {
      std::uint64_t chunk = std::min(bytes, packet_bytes);
      trace.transfers.push_back({trace.transfers.size(), src, dst, chunk, cls, work});
      bytes -= chunk;
    }
  };

  for (const auto& s : plan.slices) {
    if (!platform.is_compute(s.chiplet)) throw UnmappedLayer("slice mapped to unknown chiplet");
    ChipletId mem = platform.memory_chiplets[s.layer % platform.memory_chiplets.size()].id;
    std::size_t wi = trace.work.size();
    trace.work.push_back(
        {s.layer, s.layer, s.chiplet, mem, s.traffic.mac_count, s.traffic.dot_length, s.traffic.dot_products});
    emit(mem, s.chiplet, s.traffic.weight_bytes, TransferClass::WeightRead, wi);
    emit(mem, s.chiplet, s.traffic.input_bytes, TransferClass::ActivationRead, wi);
    emit(s.chiplet, mem, s.traffic.output_bytes, TransferClass::OutputWrite, wi);
  }
  return trace;
}

std::vector<LayerSpec> parse_model(std::istream& in, const std::string& source) {
  std::vector<LayerSpec> layers;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    LayerSpec l;
    std::string kind, pad;
    if (!(ss >> l.name)) continue;
    auto where = source + ":" + std::to_string(lineno);
    if (!(ss >> kind >> l.h >> l.w >> l.c >> l.kh >> l.kw >> l.cout >> l.stride >> pad))
      throw ConfigError("expected 'name kind H W C Kh Kw Cout stride padding' at " + where, lineno);
    if (kind == "conv") l.kind = LayerKind::Conv;
    else if (kind == "fc") l.kind = LayerKind::FC;
    else if (kind == "pool") l.kind = LayerKind::Pool;
    else if (kind == "dwconv") l.kind = LayerKind::DepthwiseConv;
    else throw ConfigError("unknown layer kind '" + kind + "' at " + where, lineno);
    if (pad == "valid") l.padding = Padding::Valid;
    else if (pad == "same") l.padding = Padding::Same;
    else throw ConfigError("unknown padding '" + pad + "' at " + where, lineno);
    int bits;
    if (ss >> bits) l.bit_width = bits;
    l.validate();
    layers.push_back(std::move(l));
  }
  return layers;
}

std::vector<LayerSpec> load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  return parse_model(in, path);
}

const std::vector<std::string>& builtin_model_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, text] : embedded_model_texts()) v.emplace_back(name);
    std::sort(v.begin(), v.end());
    return v;
  }();
  return names;
}

std::string_view builtin_model_text(std::string_view name) {
  for (const auto& [n, text] : embedded_model_texts())
    if (n == name) return text;
  throw UnknownModel("unknown model '" + std::string(name) + "'");
}

std::vector<LayerSpec> builtin_model(std::string_view name) {
  std::istringstream in{std::string(builtin_model_text(name))};
  return parse_model(in, std::string(name));
}

}  // namespace siphsim

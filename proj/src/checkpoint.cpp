#include "sfm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "sfm/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace sfm {

namespace {

constexpr char kMagic[8] = {'S', 'F', 'M', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

struct Writer {
  std::ofstream f;
  explicit Writer(const std::filesystem::path& path)
      : f(path, std::ios::binary | std::ios::trunc) {
    if (!f) throw IoError("cannot open for writing: " + path.string());
  }
  template <typename T>
  void put(T v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void put_doubles(const std::vector<double>& xs) {
    put<std::uint64_t>(xs.size());
    f.write(reinterpret_cast<const char*>(xs.data()),
            static_cast<std::streamsize>(xs.size() * sizeof(double)));
  }
  void put_string(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
};

struct Reader {
  std::ifstream f;
  std::filesystem::path path;
  explicit Reader(const std::filesystem::path& p) : f(p, std::ios::binary), path(p) {
    if (!f) throw IoError("cannot open: " + p.string());
  }
  template <typename T>
  T get() {
    T v;
    f.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!f) throw FormatError("truncated checkpoint: " + path.string());
    return v;
  }
  std::vector<double> get_doubles() {
    const auto n = get<std::uint64_t>();
    if (n > (1ULL << 32))
      throw FormatError("implausible vector length in " + path.string());
    std::vector<double> xs(n);
    f.read(reinterpret_cast<char*>(xs.data()),
           static_cast<std::streamsize>(n * sizeof(double)));
    if (!f) throw FormatError("truncated checkpoint: " + path.string());
    return xs;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    std::string s(n, '\0');
    f.read(s.data(), n);
    if (!f) throw FormatError("truncated checkpoint: " + path.string());
    return s;
  }
};

}  // namespace

Checkpoint Checkpoint::capture(const VelocityNet& net, const AdamState& opt,
                               const Rng& rng_state) {
  Checkpoint ck;
  ck.net_config = net.config();
  ck.params = net.params();
  ck.adam = opt;
  ck.rng = rng_state;
  return ck;
}

VelocityNet Checkpoint::restore_net() const {
  VelocityNet net(net_config, /*init_seed=*/0);
  if (net.num_params() != params.size())
    throw FormatError("parameter count does not match the architecture");
  net.params() = params;
  return net;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  Writer w(path);
  w.f.write(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(kVersion);

  w.put<std::int32_t>(ck.net_config.freq_bins);
  w.put<std::int32_t>(ck.net_config.context);
  w.put<std::int32_t>(ck.net_config.hidden);
  w.put<std::int32_t>(ck.net_config.blocks);
  w.put<std::int32_t>(ck.net_config.embed_dim);

  w.put<std::int32_t>(ck.stft_config.fft_size);
  w.put<std::int32_t>(ck.stft_config.hop);
  w.put<std::uint8_t>(ck.stft_config.window == WindowKind::kHann ? 0 : 1);
  w.put<std::int32_t>(ck.sample_rate);
  w.put<std::uint32_t>(ck.chunk_len);
  w.put<double>(ck.dt_min);

  w.put<std::uint8_t>(static_cast<std::uint8_t>(ck.prior.kind));
  w.put<double>(ck.prior.sigma_end);
  w.put<double>(ck.prior.alpha);

  w.put_doubles(ck.params);

  w.put<std::uint8_t>(ck.adam.has_value() ? 1 : 0);
  if (ck.adam) {
    w.put<double>(ck.adam->lr);
    w.put<double>(ck.adam->beta1);
    w.put<double>(ck.adam->beta2);
    w.put<double>(ck.adam->eps);
    w.put<std::int64_t>(ck.adam->step);
    w.put_doubles(ck.adam->m);
    w.put_doubles(ck.adam->v);
  }

  w.put_string(ck.rng.serialize());
  if (!w.f) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  char magic[8];
  r.f.read(magic, sizeof(magic));
  if (!r.f || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError("not a checkpoint file: " + path.string());
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion)
    throw FormatError("unsupported checkpoint version " +
                      std::to_string(version) + " (expected " +
                      std::to_string(kVersion) + "): " + path.string());

  Checkpoint ck;
  ck.net_config.freq_bins = r.get<std::int32_t>();
  ck.net_config.context = r.get<std::int32_t>();
  ck.net_config.hidden = r.get<std::int32_t>();
  ck.net_config.blocks = r.get<std::int32_t>();
  ck.net_config.embed_dim = r.get<std::int32_t>();

  ck.stft_config.fft_size = r.get<std::int32_t>();
  ck.stft_config.hop = r.get<std::int32_t>();
  ck.stft_config.window = r.get<std::uint8_t>() == 0 ? WindowKind::kHann
                                                     : WindowKind::kRect;
  ck.sample_rate = r.get<std::int32_t>();
  ck.chunk_len = r.get<std::uint32_t>();
  ck.dt_min = r.get<double>();

  ck.prior.kind = static_cast<PriorKind>(r.get<std::uint8_t>());
  ck.prior.sigma_end = r.get<double>();
  ck.prior.alpha = r.get<double>();

  ck.params = r.get_doubles();

  if (r.get<std::uint8_t>() != 0) {
    AdamState adam;
    adam.lr = r.get<double>();
    adam.beta1 = r.get<double>();
    adam.beta2 = r.get<double>();
    adam.eps = r.get<double>();
    adam.step = r.get<std::int64_t>();
    adam.m = r.get_doubles();
    adam.v = r.get_doubles();
    ck.adam = std::move(adam);
  }
  ck.rng = Rng::deserialize(r.get_string());

  if (ck.params.size() !=
      static_cast<std::size_t>(VelocityNet(ck.net_config, 0).num_params()))
    throw FormatError("parameter vector does not match architecture: " +
                      path.string());
  return ck;
}

}  // namespace sfm

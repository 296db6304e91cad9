#include "sfm/wav_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "sfm/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

namespace sfm {

namespace {

constexpr int kCanonicalRate = 16000;

template <typename T>
void put(std::vector<char>& out, T value) {
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T get(const std::vector<char>& buf, std::size_t offset) {
  T value;
  std::memcpy(&value, buf.data() + offset, sizeof(T));
  return value;
}

}  // namespace

void write_wav(const std::filesystem::path& path, const Waveform& w,
               WavFormat format) {
  validate(w);
  const std::uint16_t audio_format = format == WavFormat::kPcm16 ? 1 : 3;
  const std::uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const std::uint32_t byte_rate =
      static_cast<std::uint32_t>(w.sample_rate) * bits / 8;
  const std::uint32_t data_len =
      static_cast<std::uint32_t>(w.samples.size()) * bits / 8;

  std::vector<char> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put<std::uint32_t>(out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put<std::uint32_t>(out, 16);
  put<std::uint16_t>(out, audio_format);
  put<std::uint16_t>(out, 1);  // mono
  put<std::uint32_t>(out, static_cast<std::uint32_t>(w.sample_rate));
  put<std::uint32_t>(out, byte_rate);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(bits / 8));
  put<std::uint16_t>(out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put<std::uint32_t>(out, data_len);
  if (format == WavFormat::kPcm16) {
    for (double s : w.samples) {
      const double c = std::clamp(s, -1.0, 32767.0 / 32768.0);
      put<std::int16_t>(out, static_cast<std::int16_t>(std::lrint(c * 32768.0)));
    }
  } else {
    for (double s : w.samples) put<float>(out, static_cast<float>(s));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(f)),
                        std::istreambuf_iterator<char>());
  if (buf.size() < 44 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw IoError("not a RIFF/WAVE file: " + path.string());

  // Walk chunks; require fmt before data.
  std::uint16_t audio_format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_off = 0, data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::uint32_t chunk_len = get<std::uint32_t>(buf, pos + 4);
    if (std::memcmp(buf.data() + pos, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw IoError("malformed fmt chunk: " + path.string());
      audio_format = get<std::uint16_t>(buf, pos + 8);
      channels = get<std::uint16_t>(buf, pos + 10);
      rate = get<std::uint32_t>(buf, pos + 12);
      bits = get<std::uint16_t>(buf, pos + 22);
    } else if (std::memcmp(buf.data() + pos, "data", 4) == 0) {
      data_off = pos + 8;
      data_len = chunk_len;
      break;
    }
    pos += 8 + chunk_len + (chunk_len & 1);
  }
  if (data_off == 0) throw IoError("no data chunk: " + path.string());
  if (channels != 1)
    throw IoError("expected mono audio, got " + std::to_string(channels) +
                  " channels: " + path.string());
  if (rate != kCanonicalRate)
    throw IoError("expected " + std::to_string(kCanonicalRate) + " Hz, got " +
                  std::to_string(rate) + " Hz (resampling unsupported): " +
                  path.string());
  if (data_off + data_len > buf.size())
    throw IoError("truncated data chunk: " + path.string());

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  if (audio_format == 1 && bits == 16) {
    const std::size_t n = data_len / 2;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      w.samples[i] = get<std::int16_t>(buf, data_off + 2 * i) / 32768.0;
  } else if (audio_format == 3 && bits == 32) {
    const std::size_t n = data_len / 4;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      w.samples[i] = get<float>(buf, data_off + 4 * i);
  } else {
    throw IoError("unsupported sample format (need 16-bit PCM or 32-bit float): " +
                  path.string());
  }
  if (w.samples.empty()) throw IoError("empty audio: " + path.string());
  return w;
}

}  // namespace sfm

#include "spooky/timetag.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace spooky::tag {

namespace {

constexpr std::size_t kHeaderSize = 16;
constexpr std::uint16_t kVersion = 1;

void put_u16(char* p, std::uint16_t v) {
  p[0] = static_cast<char>(v & 0xff);
  p[1] = static_cast<char>(v >> 8);
}

void put_u32(char* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

void put_u64(char* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

std::uint16_t get_u16(const char* p) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(p[0]) |
                                    (static_cast<unsigned char>(p[1]) << 8));
}

std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

void write_header(std::ofstream& f, const char magic[4], Station station) {
  char h[kHeaderSize] = {};
  std::memcpy(h, magic, 4);
  put_u16(h + 4, kVersion);
  h[6] = static_cast<char>(station);
  f.write(h, kHeaderSize);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path, 0);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Station check_header(const std::string& data, const char magic[4],
                     const std::string& path) {
  if (data.size() < kHeaderSize)
    throw ParseError("truncated header in " + path, data.size());
  if (std::memcmp(data.data(), magic, 4) != 0)
    throw ParseError("bad magic in " + path, 0);
  if (get_u16(data.data() + 4) != kVersion)
    throw ParseError("unsupported version in " + path, 4);
  return static_cast<Station>(static_cast<unsigned char>(data[6]));
}

}  // namespace

void write_tags(const std::string& path, Station station,
                const std::vector<TimeTagRecord>& records) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_header(f, "QTT1", station);
  char rec[10];
  for (const auto& r : records) {
    put_u64(rec, static_cast<std::uint64_t>(r.timestamp_ps));
    rec[8] = static_cast<char>(r.channel);
    rec[9] = static_cast<char>(r.setting);
    f.write(rec, sizeof rec);
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<TimeTagRecord> read_tags(const std::string& path, Station* station_out) {
  const std::string data = read_file(path);
  const Station st = check_header(data, "QTT1", path);
  if (station_out) *station_out = st;
  const std::size_t body = data.size() - kHeaderSize;
  if (body % 10 != 0)
    throw ParseError("truncated record in " + path,
                     kHeaderSize + (body / 10) * 10);
  std::vector<TimeTagRecord> out(body / 10);
  const char* p = data.data() + kHeaderSize;
  for (auto& r : out) {
    r.timestamp_ps = static_cast<std::int64_t>(get_u64(p));
    r.channel = static_cast<std::uint8_t>(p[8]);
    r.setting = static_cast<std::uint8_t>(p[9]);
    p += 10;
  }
  return out;
}

void write_sync(const std::string& path, Station station,
                const std::vector<SyncPulseRecord>& records) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_header(f, "QSP1", station);
  char rec[12];
  for (const auto& r : records) {
    put_u64(rec, static_cast<std::uint64_t>(r.timestamp_ps));
    put_u32(rec + 8, r.pulse_index);
    f.write(rec, sizeof rec);
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<SyncPulseRecord> read_sync(const std::string& path,
                                       Station* station_out) {
  const std::string data = read_file(path);
  const Station st = check_header(data, "QSP1", path);
  if (station_out) *station_out = st;
  const std::size_t body = data.size() - kHeaderSize;
  if (body % 12 != 0)
    throw ParseError("truncated record in " + path,
                     kHeaderSize + (body / 12) * 12);
  std::vector<SyncPulseRecord> out(body / 12);
  const char* p = data.data() + kHeaderSize;
  for (auto& r : out) {
    r.timestamp_ps = static_cast<std::int64_t>(get_u64(p));
    r.pulse_index = get_u32(p + 8);
    p += 12;
  }
  return out;
}

std::vector<TimeTagRecord> read_tags_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path, 0);
  std::vector<TimeTagRecord> out;
  std::string line;
  std::size_t offset = 0, line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (line.empty() || line[0] == '#') continue;
    if (line_no == 1 && line.find("timestamp") != std::string::npos) continue;
    TimeTagRecord r;
    unsigned channel, setting;
    long long ts;
    if (std::sscanf(line.c_str(), "%lld,%u,%u", &ts, &channel, &setting) != 3)
      throw ParseError("bad CSV record in " + path, line_start);
    if (channel > 1 || setting > 1)
      throw ParseError("channel/setting out of range in " + path, line_start);
    r.timestamp_ps = ts;
    r.channel = static_cast<std::uint8_t>(channel);
    r.setting = static_cast<std::uint8_t>(setting);
    out.push_back(r);
  }
  return out;
}

void write_tags_csv(const std::string& path,
                    const std::vector<TimeTagRecord>& records) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "timestamp_ps,channel,setting\n";
  for (const auto& r : records)
    f << r.timestamp_ps << ',' << unsigned(r.channel) << ',' << unsigned(r.setting)
      << '\n';
}

std::vector<TimeTagRecord> read_tags_any(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
    return read_tags_csv(path);
  return read_tags(path);
}

}  // namespace spooky::tag

#include "qres/cac.hpp"

#include <algorithm>
#include <set>

#include "qres/error.hpp"

namespace qres::garble {

namespace {

Digest commit(const ByteArray<16>& nonce, const WireLabel& label) {
  return hash({nonce, label.bytes});
}

bool same_gc(const GarbledCircuit& a, const GarbledCircuit& b) {
  return a.session_id == b.session_id && a.circuit_digest == b.circuit_digest &&
         a.gate_count == b.gate_count && a.free_xor == b.free_xor && a.tables == b.tables;
}

void check_reveal_set(std::span<const std::uint32_t> reveal, std::size_t n) {
  if (reveal.size() + 1 != n) fail(ErrorCode::BadIndexSet, "reveal set must hold n - 1 indices");
  std::set<std::uint32_t> seen;
  for (auto i : reveal) {
    if (i >= n) fail(ErrorCode::BadIndexSet, "reveal index out of range");
    if (!seen.insert(i).second) fail(ErrorCode::BadIndexSet, "duplicate reveal index");
  }
}

std::uint32_t complement(std::span<const std::uint32_t> reveal, std::size_t n) {
  std::vector<bool> hit(n);
  for (auto i : reveal) hit[i] = true;
  return static_cast<std::uint32_t>(std::find(hit.begin(), hit.end(), false) - hit.begin());
}

}  // namespace

Bytes CutAndChoosePack::serialize() const {
  Writer w;
  w.u32(static_cast<std::uint32_t>(copies.size()));
  for (const auto& copy : copies) {
    w.blob(copy.gc.serialize());
    w.u32(static_cast<std::uint32_t>(copy.input_commitments.size()));
    for (const auto& pair : copy.input_commitments) {
      w.raw(pair[0]);
      w.raw(pair[1]);
    }
    w.raw(copy.decoding_digest);
  }
  return std::move(w).take();
}

CutAndChoosePack CutAndChoosePack::deserialize(ByteView raw) {
  Reader r(raw);
  CutAndChoosePack pack;
  std::uint32_t n = r.u32();
  if (n > r.remaining()) fail(ErrorCode::Truncated, "cut-and-choose pack");
  pack.copies.resize(n);
  for (auto& copy : pack.copies) {
    copy.gc = GarbledCircuit::deserialize(r.blob());
    std::uint32_t m = r.u32();
    if (m > r.remaining() / 64) fail(ErrorCode::Truncated, "commitments");
    copy.input_commitments.resize(m);
    for (auto& pair : copy.input_commitments) {
      pair[0] = r.fixed<32>();
      pair[1] = r.fixed<32>();
    }
    copy.decoding_digest = r.fixed<32>();
  }
  r.expect_done();
  return pack;
}

Bytes CacOpening::serialize() const {
  Writer w;
  w.u32(static_cast<std::uint32_t>(revealed_seeds.size()));
  for (const auto& [idx, seed] : revealed_seeds) {
    w.u32(idx);
    w.raw(seed);
  }
  w.u32(evaluated);
  w.u32(static_cast<std::uint32_t>(garbler_labels.size()));
  for (std::size_t i = 0; i < garbler_labels.size(); ++i) {
    w.raw(garbler_labels[i].bytes);
    w.raw(label_nonces[i]);
  }
  w.blob(decoding.serialize());
  return std::move(w).take();
}

CacOpening CacOpening::deserialize(ByteView raw) {
  Reader r(raw);
  CacOpening o;
  std::uint32_t n = r.u32();
  if (n > r.remaining() / 36) fail(ErrorCode::Truncated, "opening seeds");
  o.revealed_seeds.resize(n);
  for (auto& [idx, seed] : o.revealed_seeds) {
    idx = r.u32();
    seed = r.fixed<32>();
  }
  o.evaluated = r.u32();
  std::uint32_t m = r.u32();
  if (m > r.remaining() / 32) fail(ErrorCode::Truncated, "opening labels");
  o.garbler_labels.resize(m);
  o.label_nonces.resize(m);
  for (std::uint32_t i = 0; i < m; ++i) {
    o.garbler_labels[i].bytes = r.fixed<16>();
    o.label_nonces[i] = r.fixed<16>();
  }
  o.decoding = OutputDecoding::deserialize(r.blob());
  r.expect_done();
  return o;
}

CacCopySecrets cac_garble_copy(const circuit::Circuit& c, const ByteArray<32>& seed,
                               GarbleOptions options) {
  DeterministicRng rng(seed);
  CacCopySecrets s;
  s.result = garble(c, rng, options);
  const auto& pairs = s.result.encoding.all_pairs_for_verification();
  std::uint32_t gbits = s.result.encoding.garbler_bits();
  s.nonces.resize(gbits);
  s.commitments.resize(gbits);
  for (std::uint32_t i = 0; i < gbits; ++i) {
    for (const WireLabel* l : {&pairs[i].first, &pairs[i].second}) {
      int p = l->permute_bit();
      rng.fill(s.nonces[i][p]);
      s.commitments[i][p] = commit(s.nonces[i][p], *l);
    }
  }
  return s;
}

CacGarbler::CacGarbler(const circuit::Circuit& c, std::span<const std::uint8_t> garbler_bits,
                       std::size_t n, Rng& rng, GarbleOptions options)
    : circuit_(&c), garbler_bits_(garbler_bits.begin(), garbler_bits.end()), options_(options) {
  if (n < 2) fail(ErrorCode::BadIndexSet, "cut-and-choose needs at least two copies");
  if (garbler_bits.size() != c.input_widths()[0]) fail(ErrorCode::WidthMismatch, "garbler input width");
  seeds_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rng.fill(seeds_[i]);
    auto s = cac_garble_copy(c, seeds_[i], options);
    Digest dd = hash(s.result.decoding.serialize());
    pack_.copies.push_back({std::move(s.result.gc), std::move(s.commitments), dd});
  }
}

CacOpening CacGarbler::open(std::span<const std::uint32_t> reveal_set) {
  if (evaluated_) fail(ErrorCode::ProtocolError, "cut-and-choose challenge already answered");
  check_reveal_set(reveal_set, seeds_.size());
  const std::uint32_t e = complement(reveal_set, seeds_.size());

  CacOpening o;
  for (auto i : reveal_set) o.revealed_seeds.emplace_back(i, seeds_[i]);
  o.evaluated = e;

  auto s = cac_garble_copy(*circuit_, seeds_[e], options_);
  o.garbler_labels = s.result.encoding.encode_garbler(garbler_bits_);
  for (std::size_t i = 0; i < o.garbler_labels.size(); ++i)
    o.label_nonces.push_back(s.nonces[i][o.garbler_labels[i].permute_bit()]);
  o.decoding = s.result.decoding;
  evaluated_ = e;
  evaluated_result_ = std::move(s.result);
  return o;
}

InputEncoding& CacGarbler::evaluated_encoding() {
  if (!evaluated_) fail(ErrorCode::ProtocolError, "cut-and-choose not yet opened");
  return evaluated_result_.encoding;
}

std::vector<std::uint32_t> cac_choose(std::size_t n, Rng& rng) {
  auto keep = static_cast<std::uint32_t>(rng.uniform(n));
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < n; ++i)
    if (i != keep) out.push_back(i);
  return out;
}

bool cac_verify(const circuit::Circuit& c, const CutAndChoosePack& pack,
                std::span<const std::uint32_t> reveal_set, const CacOpening& opening,
                GarbleOptions options) {
  const std::size_t n = pack.copies.size();
  check_reveal_set(reveal_set, n);
  if (opening.evaluated != complement(reveal_set, n)) return false;
  if (opening.revealed_seeds.size() != reveal_set.size()) return false;

  std::set<std::uint32_t> want(reveal_set.begin(), reveal_set.end());
  for (const auto& [idx, seed] : opening.revealed_seeds) {
    if (!want.erase(idx)) return false;
    auto s = cac_garble_copy(c, seed, options);
    const auto& sent = pack.copies[idx];
    if (!same_gc(s.result.gc, sent.gc) || s.commitments != sent.input_commitments ||
        hash(s.result.decoding.serialize()) != sent.decoding_digest)
      return false;
  }

  const auto& ev = pack.copies[opening.evaluated];
  if (ev.gc.circuit_digest != circuit_digest(c)) return false;
  if (hash(opening.decoding.serialize()) != ev.decoding_digest) return false;
  if (opening.garbler_labels.size() != c.input_widths()[0] ||
      opening.label_nonces.size() != opening.garbler_labels.size() ||
      ev.input_commitments.size() != opening.garbler_labels.size())
    return false;
  for (std::size_t i = 0; i < opening.garbler_labels.size(); ++i) {
    const auto& l = opening.garbler_labels[i];
    if (commit(opening.label_nonces[i], l) != ev.input_commitments[i][l.permute_bit()]) return false;
  }
  return true;
}

}  // namespace qres::garble

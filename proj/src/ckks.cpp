// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#include "fhenet/ckks.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace fhenet::ckks {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>((u128)a * b % p); }

u64 powmod(u64 b, u64 e, u64 p) {
    u64 r = 1;
    b %= p;
    while (e) {
        if (e & 1) r = mulmod(r, b, p);
        b = mulmod(b, b, p);
        e >>= 1;
    }
    return r;
}

bool is_prime_u64(u64 n) {
    mpz_class z(static_cast<unsigned long>(n));
    return mpz_probab_prime_p(z.get_mpz_t(), 32) != 0;
}

// In-place NTT over Z_p, size power of two, root = primitive size-th root
// (inverse passes root^{-1}; caller divides by size).
void ntt_u64(std::vector<u64>& a, u64 p, u64 root) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const u64 wlen = powmod(root, n / len, p);
        for (std::size_t i = 0; i < n; i += len) {
            u64 w = 1;
            for (std::size_t j = 0; j < len / 2; ++j) {
                u64 u = a[i + j];
                u64 v = mulmod(a[i + j + len / 2], w, p);
                a[i + j] = u + v >= p ? u + v - p : u + v;
                a[i + j + len / 2] = u >= v ? u - v : u + p - v;
                w = mulmod(w, wlen, p);
            }
        }
    }
}

struct NttPrime {
    u64 p;
    u64 psi;  // primitive 2N-th root of unity mod p
};

// Primes congruent to 1 mod 2N, descending from 2^61, with 2N-th roots.
std::vector<NttPrime> make_primes(std::uint32_t n, std::size_t count) {
    const u64 two_n = 2ull * n;
    std::vector<NttPrime> out;
    u64 cand = ((1ull << 61) / two_n) * two_n + 1;
    while (out.size() < count) {
        cand -= two_n;
        if (!is_prime_u64(cand)) continue;
        u64 psi = 0;
        for (u64 g = 2; g < 1000; ++g) {
            u64 cand_psi = powmod(g, (cand - 1) / two_n, cand);
            if (powmod(cand_psi, n, cand) == cand - 1) {
                psi = cand_psi;
                break;
            }
        }
        if (psi == 0) continue;
        out.push_back({cand, psi});
    }
    return out;
}

std::vector<NttPrime>& prime_pool(std::uint32_t n, std::size_t count) {
    static std::map<std::uint32_t, std::vector<NttPrime>> pools;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto& pool = pools[n];
    if (pool.size() < count) {
        auto more = make_primes(n, count);
        pool = std::move(more);
    }
    return pool;
}

std::size_t max_bits(const std::vector<mpz_class>& v) {
    std::size_t m = 1;
    for (const auto& x : v) m = std::max(m, mpz_sizeinbase(x.get_mpz_t(), 2));
    return m;
}

// Negacyclic product mod one NTT prime.
std::vector<u64> nega_mult_mod(const std::vector<u64>& a, const std::vector<u64>& b, const NttPrime& pr) {
    const std::size_t n = a.size();
    const u64 p = pr.p;
    const u64 omega = mulmod(pr.psi, pr.psi, p);
    std::vector<u64> fa(n), fb(n);
    u64 pw = 1;
    for (std::size_t i = 0; i < n; ++i) {
        fa[i] = mulmod(a[i], pw, p);
        fb[i] = mulmod(b[i], pw, p);
        pw = mulmod(pw, pr.psi, p);
    }
    ntt_u64(fa, p, omega);
    ntt_u64(fb, p, omega);
    for (std::size_t i = 0; i < n; ++i) fa[i] = mulmod(fa[i], fb[i], p);
    ntt_u64(fa, p, powmod(omega, p - 2, p));
    const u64 n_inv = powmod(static_cast<u64>(n), p - 2, p);
    const u64 ipsi = powmod(pr.psi, p - 2, p);
    pw = n_inv;
    for (std::size_t i = 0; i < n; ++i) {
        fa[i] = mulmod(fa[i], pw, p);
        pw = mulmod(pw, ipsi, p);
    }
    return fa;
}

}  // namespace

std::vector<mpz_class> negacyclic_schoolbook(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
    const std::size_t n = a.size();
    std::vector<mpz_class> r(n, mpz_class(0));
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (i + j < n)
                r[i + j] += a[i] * b[j];
            else
                r[i + j - n] -= a[i] * b[j];
        }
    }
    return r;
}

std::vector<mpz_class> negacyclic_ntt(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
    const std::size_t n = a.size();
    if (b.size() != n || !is_power_of_two(n)) throw ShapeError("negacyclic_ntt: bad operand sizes");
    const std::size_t need_bits = max_bits(a) + max_bits(b) + log2_exact(n) + 2;
    const std::size_t count = need_bits / 60 + 1;
    const auto& primes = prime_pool(static_cast<std::uint32_t>(n), count);

    std::vector<std::vector<u64>> residues(count);
    std::vector<u64> ra(n), rb(n);
    for (std::size_t k = 0; k < count; ++k) {
        const u64 p = primes[k].p;
        for (std::size_t i = 0; i < n; ++i) {
            ra[i] = mpz_fdiv_ui(a[i].get_mpz_t(), p);
            rb[i] = mpz_fdiv_ui(b[i].get_mpz_t(), p);
        }
        residues[k] = nega_mult_mod(ra, rb, primes[k]);
    }

    // CRT combine, centered
    mpz_class big_m(1);
    for (std::size_t k = 0; k < count; ++k) big_m *= mpz_class(static_cast<unsigned long>(primes[k].p));
    std::vector<mpz_class> mi(count);
    std::vector<u64> yi(count);
    for (std::size_t k = 0; k < count; ++k) {
        mi[k] = big_m / static_cast<unsigned long>(primes[k].p);
        mpz_class inv;
        mpz_class pk(static_cast<unsigned long>(primes[k].p));
        if (mpz_invert(inv.get_mpz_t(), mi[k].get_mpz_t(), pk.get_mpz_t()) == 0)
            throw ConfigError("negacyclic_ntt: CRT inversion failed");
        yi[k] = mpz_get_ui(inv.get_mpz_t());
    }
    const mpz_class half_m = big_m / 2;
    std::vector<mpz_class> out(n);
    mpz_class acc;
    for (std::size_t i = 0; i < n; ++i) {
        acc = 0;
        for (std::size_t k = 0; k < count; ++k) {
            const u64 t = mulmod(residues[k][i], yi[k], primes[k].p);
            mpz_addmul_ui(acc.get_mpz_t(), mi[k].get_mpz_t(), static_cast<unsigned long>(t));
        }
        acc %= big_m;
        if (acc < 0) acc += big_m;
        if (acc > half_m) acc -= big_m;
        out[i] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace detail {
struct CkksPayload final : CipherPayload {
    RingPoly b, a;
};
}  // namespace detail

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

class CtrRng {
public:
    explicit CtrRng(u64 seed) : state_(seed) {}
    u64 next() {
        state_ = mix64(state_);
        return state_;
    }
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double gauss(double sigma) {
        double u1 = std::max(uniform01(), 1e-300);
        double u2 = uniform01();
        return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTau * u2);
    }

private:
    u64 state_;
};

void bit_reverse_permute(std::vector<cplx>& v, std::uint32_t size) {
    for (std::uint32_t i = 1, j = 0; i < size; ++i) {
        std::uint32_t bit = size >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(v[i], v[j]);
    }
}

}  // namespace

struct CkksContext::Impl {
    std::uint32_t n = 0;   // ring dimension
    std::uint32_t nh = 0;  // n / 2 slots available
    mpz_class aux;         // key-switch modulus P
    std::vector<mpz_class> q;  // q[l] per level

    RingPoly secret;  // centered ternary
    RingPoly pk_b, pk_a;
    struct KsKey {
        RingPoly b, a;
    };
    KsKey relin;
    std::map<std::uint32_t, KsKey> galois;

    std::vector<cplx> ksi;                // e^{2 pi i k / 2N}, k in [0, 2N]
    std::vector<std::uint32_t> rot_group;  // 5^j mod 2N

    mutable CtrRng rng{0};
    mutable std::mutex rng_mtx;
    u64 key_id = 0;

    const mpz_class& modulus(int level) const { return q.at(level); }

    void reduce(RingPoly& p, const mpz_class& m) const {
        for (auto& c : p.c) {
            c %= m;
            if (c < 0) c += m;
        }
    }

    RingPoly centered(const RingPoly& p, const mpz_class& m) const {
        RingPoly out(p.size());
        const mpz_class half = m / 2;
        for (std::size_t i = 0; i < p.size(); ++i) {
            out.c[i] = p.c[i];
            if (out.c[i] > half) out.c[i] -= m;
        }
        return out;
    }

    RingPoly add_polys(const RingPoly& x, const RingPoly& y, const mpz_class& m) const {
        RingPoly out(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            out.c[i] = x.c[i] + y.c[i];
            if (out.c[i] >= m) out.c[i] -= m;
        }
        return out;
    }

    RingPoly sub_polys(const RingPoly& x, const RingPoly& y, const mpz_class& m) const {
        RingPoly out(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            out.c[i] = x.c[i] - y.c[i];
            if (out.c[i] < 0) out.c[i] += m;
        }
        return out;
    }

    // Negacyclic product of centered representatives, reduced mod m.
    RingPoly mult_polys(const RingPoly& x, const RingPoly& y, const mpz_class& mx, const mpz_class& my,
                        const mpz_class& m) const {
        auto prod = negacyclic_ntt(centered(x, mx).c, centered(y, my).c);
        RingPoly out(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            out.c[i] = prod[i] % m;
            if (out.c[i] < 0) out.c[i] += m;
        }
        return out;
    }

    // round(x / 2^bits) on a centered value, result reduced mod m.
    RingPoly round_div_pow2(const std::vector<mpz_class>& x, int bits, const mpz_class& m) const {
        RingPoly out(n);
        const mpz_class half = mpz_class(1) << (bits - 1);
        for (std::uint32_t i = 0; i < n; ++i) {
            mpz_class t = x[i] + half;
            mpz_fdiv_q_2exp(t.get_mpz_t(), t.get_mpz_t(), bits);
            out.c[i] = t % m;
            if (out.c[i] < 0) out.c[i] += m;
        }
        return out;
    }

    RingPoly automorph(const RingPoly& p, std::uint32_t g) const {
        RingPoly out(n);
        const std::uint64_t two_n = 2ull * n;
        const mpz_class& top = q.back();
        for (std::uint32_t i = 0; i < n; ++i) {
            std::uint64_t ip = (static_cast<std::uint64_t>(i) * g) % two_n;
            if (ip < n)
                out.c[ip] = p.c[i];
            else
                out.c[ip - n] = (p.c[i] == 0) ? mpz_class(0) : top - p.c[i];
        }
        return out;
    }

    // automorph for a poly mod an arbitrary modulus
    RingPoly automorph_mod(const RingPoly& p, std::uint32_t g, const mpz_class& m) const {
        RingPoly out(n);
        const std::uint64_t two_n = 2ull * n;
        for (std::uint32_t i = 0; i < n; ++i) {
            std::uint64_t ip = (static_cast<std::uint64_t>(i) * g) % two_n;
            if (ip < n)
                out.c[ip] = p.c[i];
            else
                out.c[ip - n] = (p.c[i] == 0) ? mpz_class(0) : m - p.c[i];
        }
        return out;
    }

    RingPoly uniform_poly(const mpz_class& m, CtrRng& r) const {
        const std::size_t bits = mpz_sizeinbase(m.get_mpz_t(), 2);
        const std::size_t words = bits / 64 + 1;
        RingPoly out(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            mpz_class v(0);
            for (std::size_t wi = 0; wi < words; ++wi) {
                v <<= 64;
                v += mpz_class(static_cast<unsigned long>(r.next()));
            }
            out.c[i] = v % m;
        }
        return out;
    }

    RingPoly gauss_poly(double sigma, const mpz_class& m, CtrRng& r) const {
        RingPoly out(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            long v = std::lround(r.gauss(sigma));
            out.c[i] = v >= 0 ? mpz_class(v) : m + v;
        }
        return out;
    }

    RingPoly ternary_poly(const mpz_class& m, CtrRng& r) const {
        RingPoly out(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            u64 bits = r.next();
            int v = (bits & 1) ? ((bits >> 1) & 1 ? -1 : 1) : 0;
            out.c[i] = v >= 0 ? mpz_class(v) : m + v;
        }
        return out;
    }
};

CkksContext::CkksContext(CkksParams params)
    : params_(std::move(params)), rotations_(params_.rotation_amounts), impl_(std::make_unique<Impl>()) {
    if (!is_power_of_two(params_.ring_dim)) throw ConfigError("ckks: ring_dim must be a power of two");
    if (params_.log_scale >= params_.log_q0)
        throw ScaleError("ckks: scale must be smaller than the base modulus");
    if (params_.max_level < 1) throw ConfigError("ckks: max_level must be >= 1");

    auto& im = *impl_;
    im.n = params_.ring_dim;
    im.nh = im.n / 2;
    for (int l = 0; l <= params_.max_level; ++l) im.q.push_back(mpz_class(1) << params_.log_q(l));
    im.aux = mpz_class(1) << params_.log_p();
    im.rng = CtrRng(mix64(params_.seed, 0x636b6b73));
    im.key_id = mix64(params_.seed, 0x6b657963);

    const std::uint64_t two_n = 2ull * im.n;
    im.ksi.resize(two_n + 1);
    for (std::uint64_t k = 0; k <= two_n; ++k) {
        double ang = kTau * static_cast<double>(k) / static_cast<double>(two_n);
        im.ksi[k] = cplx(std::cos(ang), std::sin(ang));
    }
    im.rot_group.resize(im.nh);
    std::uint64_t five = 1;
    for (std::uint32_t j = 0; j < im.nh; ++j) {
        im.rot_group[j] = static_cast<std::uint32_t>(five);
        five = (five * 5) % two_n;
    }

    // keygen
    const mpz_class& q_top = im.q.back();
    const mpz_class pq = im.aux * q_top;
    im.secret = im.ternary_poly(q_top, im.rng);
    RingPoly e = im.gauss_poly(params_.sigma, q_top, im.rng);
    im.pk_a = im.uniform_poly(q_top, im.rng);
    // pk_b = -a*s + e
    RingPoly as = im.mult_polys(im.pk_a, im.secret, q_top, q_top, q_top);
    im.pk_b = im.sub_polys(e, as, q_top);

    auto make_ks_key = [&](const RingPoly& target_mod_qtop) {
        Impl::KsKey k;
        k.a = im.uniform_poly(pq, im.rng);
        RingPoly e2 = im.gauss_poly(params_.sigma, pq, im.rng);
        RingPoly as2 = im.mult_polys(k.a, im.secret, pq, q_top, pq);
        // b = -a*s + e + P * target
        RingPoly pt(im.n);
        for (std::uint32_t i = 0; i < im.n; ++i) {
            mpz_class t = target_mod_qtop.c[i];
            if (t > q_top / 2) t -= q_top;  // centered lift before scaling by P
            pt.c[i] = (t * im.aux) % pq;
            if (pt.c[i] < 0) pt.c[i] += pq;
        }
        k.b = im.add_polys(im.sub_polys(e2, as2, pq), pt, pq);
        return k;
    };

    RingPoly s2 = im.mult_polys(im.secret, im.secret, q_top, q_top, q_top);
    im.relin = make_ks_key(s2);
    for (std::uint32_t amount : params_.rotation_amounts) {
        const std::uint32_t g = im.rot_group[amount % im.nh];
        im.galois.emplace(amount, make_ks_key(im.automorph(im.secret, g)));
    }
}

CkksContext::~CkksContext() = default;

RingPoly CkksContext::encode(const SlotVec& m, int level) const {
    auto& im = *impl_;
    const std::uint32_t slots = static_cast<std::uint32_t>(m.size());
    if (slots > im.nh) throw PackingError("ckks encode: more slots than N/2");
    const std::uint32_t gap = im.nh / slots;
    std::vector<cplx> vals = m.data();

    // inverse special embedding (variant of the inverse FFT over the 5^j
    // root ordering)
    const std::uint64_t two_n = 2ull * im.n;
    for (std::uint32_t len = slots; len >= 2; len >>= 1) {
        const std::uint32_t lenh = len >> 1;
        const std::uint32_t lenq = len << 2;
        for (std::uint32_t i = 0; i < slots; i += len) {
            for (std::uint32_t j = 0; j < lenh; ++j) {
                const std::uint32_t idx =
                    static_cast<std::uint32_t>((lenq - (im.rot_group[j] % lenq)) * (two_n / lenq));
                cplx u = vals[i + j] + vals[i + j + lenh];
                cplx v = (vals[i + j] - vals[i + j + lenh]) * im.ksi[idx];
                vals[i + j] = u;
                vals[i + j + lenh] = v;
            }
        }
    }
    bit_reverse_permute(vals, slots);
    for (auto& z : vals) z /= static_cast<double>(slots);

    const mpz_class& q = im.modulus(level);
    const mpz_class half_q = q / 2;
    const double scale = std::ldexp(1.0, params_.log_scale);
    RingPoly out(im.n);
    for (std::uint32_t i = 0; i < slots; ++i) {
        const double re = vals[i].real() * scale;
        const double imag = vals[i].imag() * scale;
        if (std::abs(re) >= std::ldexp(1.0, params_.log_q(level) - 1) ||
            std::abs(imag) >= std::ldexp(1.0, params_.log_q(level) - 1))
            throw EncodingError("ckks encode: value overflows coefficient modulus");
        mpz_class cr(std::round(re));
        mpz_class ci(std::round(imag));
        if (cr < 0) cr += q;
        if (ci < 0) ci += q;
        out.c[i * gap] = cr;
        out.c[i * gap + im.nh] = ci;
    }
    (void)half_q;
    return out;
}

SlotVec CkksContext::decode(const RingPoly& p, int level, std::uint32_t slots) const {
    auto& im = *impl_;
    const std::uint32_t gap = im.nh / slots;
    const mpz_class& q = im.modulus(level);
    const mpz_class half_q = q / 2;
    const double inv_scale = std::ldexp(1.0, -params_.log_scale);

    std::vector<cplx> vals(slots);
    for (std::uint32_t i = 0; i < slots; ++i) {
        mpz_class re = p.c[i * gap];
        mpz_class imag = p.c[i * gap + im.nh];
        if (re > half_q) re -= q;
        if (imag > half_q) imag -= q;
        vals[i] = cplx(re.get_d() * inv_scale, imag.get_d() * inv_scale);
    }

    // forward special embedding
    const std::uint64_t two_n = 2ull * im.n;
    bit_reverse_permute(vals, slots);
    for (std::uint32_t len = 2; len <= slots; len <<= 1) {
        const std::uint32_t lenh = len >> 1;
        const std::uint32_t lenq = len << 2;
        for (std::uint32_t i = 0; i < slots; i += len) {
            for (std::uint32_t j = 0; j < lenh; ++j) {
                const std::uint32_t idx = static_cast<std::uint32_t>((im.rot_group[j] % lenq) * (two_n / lenq));
                cplx u = vals[i + j];
                cplx v = vals[i + j + lenh] * im.ksi[idx];
                vals[i + j] = u + v;
                vals[i + j + lenh] = u - v;
            }
        }
    }
    return SlotVec(std::move(vals));
}

namespace {

const detail::CkksPayload& unwrap_ckks(const Ciphertext& c, u64 key_id, const char* op) {
    if (!c.valid()) throw KeyError(std::string(op) + ": empty ciphertext");
    if (c.key_id() != key_id) throw KeyError(std::string(op) + ": ciphertext from different keys");
    return static_cast<const detail::CkksPayload&>(c.payload());
}

}  // namespace

Ciphertext CkksContext::encrypt(const SlotVec& m) {
    auto& im = *impl_;
    const int level = params_.max_level;
    const mpz_class& q = im.modulus(level);
    RingPoly msg = encode(m, level);

    RingPoly v, e0, e1;
    {
        std::lock_guard<std::mutex> lock(im.rng_mtx);
        v = im.ternary_poly(q, im.rng);
        e0 = im.gauss_poly(params_.sigma, q, im.rng);
        e1 = im.gauss_poly(params_.sigma, q, im.rng);
    }
    auto payload = std::make_shared<detail::CkksPayload>();
    RingPoly vb = im.mult_polys(v, im.pk_b, q, im.q.back(), q);
    RingPoly va = im.mult_polys(v, im.pk_a, q, im.q.back(), q);
    payload->b = im.add_polys(im.add_polys(vb, e0, q), msg, q);
    payload->a = im.add_polys(va, e1, q);
    meter_.bump(OpKind::kEncrypt);
    const u64 lineage = mix64(params_.seed, m.size());
    return Ciphertext(std::move(payload), static_cast<std::uint32_t>(m.size()), level,
                      std::ldexp(1.0, params_.log_scale), im.key_id, lineage);
}

SlotVec CkksContext::decrypt(const Ciphertext& c) const {
    auto& im = *impl_;
    const auto& p = unwrap_ckks(c, im.key_id, "decrypt");
    const mpz_class& q = im.modulus(c.level());
    RingPoly as = im.mult_polys(p.a, im.secret, q, im.q.back(), q);
    RingPoly m = im.add_polys(p.b, as, q);
    meter_.bump(OpKind::kDecrypt);
    return decode(m, c.level(), c.slot_count());
}

namespace {

int common_level(const Ciphertext& a, const Ciphertext& b) { return std::min(a.level(), b.level()); }

}  // namespace

Ciphertext CkksContext::add(const Ciphertext& a, const Ciphertext& b) const {
    auto& im = *impl_;
    const auto& pa = unwrap_ckks(a, im.key_id, "add");
    const auto& pb = unwrap_ckks(b, im.key_id, "add");
    if (a.slot_count() != b.slot_count()) throw ShapeError("add: slot_count mismatch");
    if (a.scale() != b.scale()) throw ScaleError("add: scale mismatch");
    const int level = common_level(a, b);
    const mpz_class& q = im.modulus(level);
    RingPoly xb = pa.b, xa = pa.a, yb = pb.b, ya = pb.a;
    im.reduce(xb, q);
    im.reduce(xa, q);
    im.reduce(yb, q);
    im.reduce(ya, q);
    auto payload = std::make_shared<detail::CkksPayload>();
    payload->b = im.add_polys(xb, yb, q);
    payload->a = im.add_polys(xa, ya, q);
    meter_.bump(OpKind::kAdd);
    return Ciphertext(std::move(payload), a.slot_count(), level, a.scale(), im.key_id,
                      mix64(a.lineage(), b.lineage()));
}

Ciphertext CkksContext::sub(const Ciphertext& a, const Ciphertext& b) const {
    auto& im = *impl_;
    const auto& pa = unwrap_ckks(a, im.key_id, "sub");
    const auto& pb = unwrap_ckks(b, im.key_id, "sub");
    if (a.slot_count() != b.slot_count()) throw ShapeError("sub: slot_count mismatch");
    const int level = common_level(a, b);
    const mpz_class& q = im.modulus(level);
    RingPoly xb = pa.b, xa = pa.a, yb = pb.b, ya = pb.a;
    im.reduce(xb, q);
    im.reduce(xa, q);
    im.reduce(yb, q);
    im.reduce(ya, q);
    auto payload = std::make_shared<detail::CkksPayload>();
    payload->b = im.sub_polys(xb, yb, q);
    payload->a = im.sub_polys(xa, ya, q);
    meter_.bump(OpKind::kAdd);
    return Ciphertext(std::move(payload), a.slot_count(), level, a.scale(), im.key_id,
                      mix64(a.lineage(), b.lineage()));
}

Ciphertext CkksContext::add_pt(const Ciphertext& a, const SlotVec& p) const {
    auto& im = *impl_;
    const auto& pa = unwrap_ckks(a, im.key_id, "add_pt");
    if (a.slot_count() != p.size()) throw ShapeError("add_pt: slot_count mismatch");
    const mpz_class& q = im.modulus(a.level());
    RingPoly msg = encode(p, a.level());
    auto payload = std::make_shared<detail::CkksPayload>();
    RingPoly xb = pa.b;
    im.reduce(xb, q);
    payload->b = im.add_polys(xb, msg, q);
    payload->a = pa.a;
    meter_.bump(OpKind::kAdd);
    return Ciphertext(std::move(payload), a.slot_count(), a.level(), a.scale(), im.key_id, mix64(a.lineage(), 0x70));
}

Ciphertext CkksContext::mult_ct(const Ciphertext& a, const Ciphertext& b) const {
    auto& im = *impl_;
    const auto& pa = unwrap_ckks(a, im.key_id, "mult_ct");
    const auto& pb = unwrap_ckks(b, im.key_id, "mult_ct");
    if (a.slot_count() != b.slot_count()) throw ShapeError("mult_ct: slot_count mismatch");
    const int level = common_level(a, b);
    if (level < 1) throw DepthExhausted("mult_ct: modulus chain consumed");
    const mpz_class& q = im.modulus(level);

    RingPoly xb = pa.b, xa = pa.a, yb = pb.b, ya = pb.a;
    im.reduce(xb, q);
    im.reduce(xa, q);
    im.reduce(yb, q);
    im.reduce(ya, q);

    RingPoly d0 = im.mult_polys(xb, yb, q, q, q);
    RingPoly d1 = im.add_polys(im.mult_polys(xb, ya, q, q, q), im.mult_polys(xa, yb, q, q, q), q);
    RingPoly d2 = im.mult_polys(xa, ya, q, q, q);

    // relinearize: (d0, d1) += round(d2 * evk / P)
    const mpz_class pq = im.aux * im.q.back();
    auto d2c = im.centered(d2, q);
    auto prod_b = negacyclic_ntt(d2c.c, im.centered(im.relin.b, pq).c);
    auto prod_a = negacyclic_ntt(d2c.c, im.centered(im.relin.a, pq).c);
    RingPoly ks_b = im.round_div_pow2(prod_b, params_.log_p(), q);
    RingPoly ks_a = im.round_div_pow2(prod_a, params_.log_p(), q);
    RingPoly c0 = im.add_polys(d0, ks_b, q);
    RingPoly c1 = im.add_polys(d1, ks_a, q);

    // rescale
    const mpz_class& q_next = im.modulus(level - 1);
    auto payload = std::make_shared<detail::CkksPayload>();
    payload->b = im.round_div_pow2(im.centered(c0, q).c, params_.log_scale, q_next);
    payload->a = im.round_div_pow2(im.centered(c1, q).c, params_.log_scale, q_next);
    meter_.bump(OpKind::kMultCt);
    meter_.bump(OpKind::kRescale);
    meter_.note_depth(params_.max_level - (level - 1));
    return Ciphertext(std::move(payload), a.slot_count(), level - 1, a.scale(), im.key_id,
                      mix64(a.lineage(), b.lineage()));
}

Ciphertext CkksContext::mult_pt(const Ciphertext& a, const SlotVec& p) const {
    auto& im = *impl_;
    const auto& pa = unwrap_ckks(a, im.key_id, "mult_pt");
    if (a.slot_count() != p.size()) throw ShapeError("mult_pt: slot_count mismatch");
    if (a.level() < 1) throw DepthExhausted("mult_pt: modulus chain consumed");
    const int level = a.level();
    const mpz_class& q = im.modulus(level);
    RingPoly msg = encode(p, level);
    RingPoly xb = pa.b, xa = pa.a;
    im.reduce(xb, q);
    im.reduce(xa, q);
    RingPoly c0 = im.mult_polys(xb, msg, q, q, q);
    RingPoly c1 = im.mult_polys(xa, msg, q, q, q);
    const mpz_class& q_next = im.modulus(level - 1);
    auto payload = std::make_shared<detail::CkksPayload>();
    payload->b = im.round_div_pow2(im.centered(c0, q).c, params_.log_scale, q_next);
    payload->a = im.round_div_pow2(im.centered(c1, q).c, params_.log_scale, q_next);
    meter_.bump(OpKind::kMultPt);
    meter_.bump(OpKind::kRescale);
    meter_.note_depth(params_.max_level - (level - 1));
    return Ciphertext(std::move(payload), a.slot_count(), level - 1, a.scale(), im.key_id, mix64(a.lineage(), 0x6d));
}

Ciphertext CkksContext::rotate_left(const Ciphertext& c, std::int64_t r) const {
    auto& im = *impl_;
    const auto& pc = unwrap_ckks(c, im.key_id, "rotate_left");
    const std::int64_t slots = c.slot_count();
    const std::uint32_t amount = static_cast<std::uint32_t>(((r % slots) + slots) % slots);
    if (amount == 0) return c;
    auto it = im.galois.find(amount);
    if (it == im.galois.end())
        throw MissingKeyError("rotate_left: no rotation key for amount " + std::to_string(amount));

    const int level = c.level();
    const mpz_class& q = im.modulus(level);
    const std::uint32_t g = im.rot_group[amount % im.nh];
    RingPoly xb = pc.b, xa = pc.a;
    im.reduce(xb, q);
    im.reduce(xa, q);
    RingPoly rb = im.automorph_mod(xb, g, q);
    RingPoly ra = im.automorph_mod(xa, g, q);

    const mpz_class pq = im.aux * im.q.back();
    auto rac = im.centered(ra, q);
    auto prod_b = negacyclic_ntt(rac.c, im.centered(it->second.b, pq).c);
    auto prod_a = negacyclic_ntt(rac.c, im.centered(it->second.a, pq).c);
    auto payload = std::make_shared<detail::CkksPayload>();
    payload->b = im.add_polys(rb, im.round_div_pow2(prod_b, params_.log_p(), q), q);
    payload->a = im.round_div_pow2(prod_a, params_.log_p(), q);
    meter_.bump(OpKind::kRotate);
    return Ciphertext(std::move(payload), c.slot_count(), level, c.scale(), im.key_id, mix64(c.lineage(), amount));
}

std::vector<std::uint8_t> CkksContext::ciphertext_bytes(const Ciphertext& c) const {
    auto& im = *impl_;
    const auto& p = unwrap_ckks(c, im.key_id, "ciphertext_bytes");
    std::vector<std::uint8_t> out;
    auto dump = [&](const RingPoly& poly) {
        for (const auto& coeff : poly.c) {
            std::string s = coeff.get_str(16);
            out.insert(out.end(), s.begin(), s.end());
            out.push_back(0);
        }
    };
    dump(p.b);
    dump(p.a);
    return out;
}

}  // namespace fhenet::ckks

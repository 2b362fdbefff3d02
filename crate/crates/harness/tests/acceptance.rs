//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use bls12_381::{G1Affine, G2Affine};
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use tbids_core::batch::{self, VerifyItem};
use tbids_core::codec::{self, DecodeError, GroupElement};
use tbids_core::hibe::{self, IdentityVector, ParentKey, PublicParams};
use tbids_core::hibs;
use tbids_core::tbids::{
    self, binid, dfeval, fs_gen, NodeLabel, NodeSecret, SchemeKind, StackEntry, TbidsParams,
    TbidsSignature, VerifyingKey,
};
use tbids_core::Error;
use tbids_harness::scenario::Scenario;
use tbids_harness::BUNDLED_SCENARIOS;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_identity(rng: &mut ChaCha20Rng) -> IdentityVector {
    let len = 1 + (rng.next_u32() % 16) as usize;
    let mut level = vec![0u8; len];
    rng.fill_bytes(&mut level);
    IdentityVector::single(level).unwrap()
}

fn random_message(rng: &mut ChaCha20Rng) -> Vec<u8> {
    let mut msg = vec![0u8; (rng.next_u32() % 64) as usize];
    rng.fill_bytes(&mut msg);
    msg
}

struct Triple {
    epoch: u64,
    id: IdentityVector,
    msg: Vec<u8>,
    sig: TbidsSignature,
}

/// Flips one uniformly chosen byte of (signature envelope body, message,
/// identity level) and reports whether the result is rejected.
fn tamper_rejected(
    params: &TbidsParams,
    vk: &VerifyingKey,
    t: &Triple,
    rng: &mut ChaCha20Rng,
) -> bool {
    let mut sig = codec::encode(&t.sig);
    let mut msg = t.msg.clone();
    let mut level = t.id.levels()[0].clone();
    let body = sig.len() - codec::HEADER_LEN;
    let total = body + msg.len() + level.len();
    let pos = (rng.next_u64() % total as u64) as usize;
    let flip = 1 + (rng.next_u32() % 255) as u8;
    if pos < body {
        sig[codec::HEADER_LEN + pos] ^= flip;
    } else if pos < body + msg.len() {
        msg[pos - body] ^= flip;
    } else {
        level[pos - body - msg.len()] ^= flip;
    }
    let id = IdentityVector::single(level).unwrap();
    match codec::decode::<TbidsSignature>(&sig) {
        Ok(sig) => !tbids::verify(params, vk, t.epoch, &id, &msg, &sig),
        Err(_) => true,
    }
}

fn correctness_for(scheme: SchemeKind, seed: u64) -> (usize, usize, usize) {
    const N: usize = 1000;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let params = TbidsParams::setup(1024, 1, &mut rng).unwrap();
    let mut epochs: Vec<u64> = (0..N).map(|_| rng.next_u64() % params.epochs()).collect();
    let triples: Vec<Triple>;
    let vk;
    match scheme {
        SchemeKind::Flat => {
            let (pk, msk) = tbids::flat_keygen(&params, &mut rng);
            vk = VerifyingKey { scheme, pk };
            triples = epochs
                .iter()
                .map(|&epoch| {
                    let id = random_identity(&mut rng);
                    let msg = random_message(&mut rng);
                    let key = tbids::flat_delegate(&params, &msk, epoch, &id, &mut rng).unwrap();
                    let sig = key.sign(&msg, &mut rng);
                    Triple { epoch, id, msg, sig }
                })
                .collect();
        }
        SchemeKind::ForwardSecure => {
            epochs.sort_unstable();
            let (pk, mut state) = fs_gen(&params, &mut rng);
            vk = VerifyingKey { scheme, pk };
            let mut out = Vec::with_capacity(N);
            for &epoch in &epochs {
                while state.current_epoch() < epoch {
                    state.update(&params, &mut rng).unwrap();
                }
                let id = random_identity(&mut rng);
                let msg = random_message(&mut rng);
                let key = state.delegate(&params, epoch, &id, &mut rng).unwrap();
                let sig = key.sign(&msg, &mut rng);
                out.push(Triple { epoch, id, msg, sig });
            }
            triples = out;
        }
    }
    let items: Vec<VerifyItem<'_>> = triples
        .iter()
        .map(|t| VerifyItem { epoch: t.epoch, identity: &t.id, msg: &t.msg, sig: &t.sig })
        .collect();
    let verified = batch::verify_all(&params, &vk, &items).iter().filter(|ok| **ok).count();
    let rejected = triples.iter().filter(|t| tamper_rejected(&params, &vk, t, &mut rng)).count();
    (N, verified, rejected)
}

fn c1_correctness() -> Outcome {
    let started = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (scheme, seed) in [(SchemeKind::Flat, 101), (SchemeKind::ForwardSecure, 102)] {
        let (n, verified, rejected) = correctness_for(scheme, seed);
        ok &= verified == n && rejected == n;
        parts.push(format!("{scheme}: verified {verified}/{n}, tampered rejected {rejected}/{n}"));
    }
    let elapsed = started.elapsed();
    ok &= elapsed < Duration::from_secs(300);
    check(ok, format!("{}; {:.1}s of 300s", parts.join("; "), elapsed.as_secs_f64()))
}

fn c2_cross_verifier() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(201);
    let params = TbidsParams::setup(16, 1, &mut rng).unwrap();
    let (flat_pk, msk) = tbids::flat_keygen(&params, &mut rng);
    let (fs_pk, mut state) = fs_gen(&params, &mut rng);
    let (mut cases, mut disagreements, mut honest) = (0, 0, 0);
    for i in 0..500u64 {
        let scheme = if i % 2 == 0 { SchemeKind::Flat } else { SchemeKind::ForwardSecure };
        let epoch = if scheme == SchemeKind::Flat {
            rng.next_u64() % 16
        } else {
            // walk the state forward slowly
            if i % 40 == 39 && !state.is_exhausted() {
                state.update(&params, &mut rng).unwrap();
            }
            state.current_epoch()
        };
        let id = random_identity(&mut rng);
        let msg = random_message(&mut rng);
        let (pk, key) = match scheme {
            SchemeKind::Flat => (flat_pk, tbids::flat_delegate(&params, &msk, epoch, &id, &mut rng).unwrap()),
            SchemeKind::ForwardSecure => (fs_pk, state.delegate(&params, epoch, &id, &mut rng).unwrap()),
        };
        let vk = VerifyingKey { scheme, pk };
        let mut sig = key.sign(&msg, &mut rng);
        let (mut v_epoch, mut v_msg) = (epoch, msg.clone());
        match rng.next_u32() % 4 {
            0 => {}
            1 => v_epoch = (epoch + 1) % 16,
            2 => v_msg.push(0),
            _ => sig.0.a0 += bls12_381::G1Projective::generator(),
        }
        let det = tbids::verify(&params, &vk, v_epoch, &id, &v_msg, &sig);
        let prob = tbids::verify_probabilistic(&params, &vk, v_epoch, &id, &v_msg, &sig, &mut rng);
        cases += 1;
        honest += usize::from(det);
        disagreements += usize::from(det != prob);
    }
    check(
        disagreements == 0 && cases >= 500 && honest > 0 && honest < cases,
        format!("{cases} cases ({honest} valid), {disagreements} disagreements"),
    )
}

/// Every identity over {A, B} with 1..=4 levels.
fn all_identities(max: usize) -> Vec<Vec<&'static [u8]>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<&'static [u8]>> = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for prefix in &frontier {
            for sym in [&b"A"[..], &b"B"[..]] {
                let mut id = prefix.clone();
                id.push(sym);
                next.push(id);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn c3_hibe_brute_force() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(301);
    let pp = PublicParams::setup(4, &mut rng).unwrap();
    let pair = hibe::gen(&pp, &mut rng);
    let (mut keys, mut failures) = (0, 0);
    let ids = all_identities(4);
    for id in &ids {
        let target = IdentityVector::new(id.iter().map(|l| l.to_vec())).unwrap();
        let m = hibe::random_message(&mut rng);
        let ct = hibe::encrypt(&pp, &pair.pk, &target, &m, &mut rng).unwrap();
        // a sibling identity of the same depth must not decrypt
        let mut sib = id.clone();
        let last = sib.len() - 1;
        sib[last] = if sib[last] == b"A" { b"B" } else { b"A" };
        let sibling = IdentityVector::new(sib.iter().map(|l| l.to_vec())).unwrap();
        let sib_ct = hibe::encrypt(&pp, &pair.pk, &sibling, &m, &mut rng).unwrap();
        // each subset of intermediate depths is one delegation path
        let k = id.len();
        for mask in 0u32..(1 << (k - 1)) {
            let mut stops: Vec<usize> = (1..k).filter(|d| mask & (1 << (d - 1)) != 0).collect();
            stops.push(k);
            let mut key = None;
            for &d in &stops {
                let prefix = target.prefix(d).unwrap();
                let parent = match &key {
                    None => ParentKey::Master(&pair.msk),
                    Some(k) => ParentKey::Delegated(k),
                };
                key = Some(hibe::delegate(&pp, parent, &prefix, &mut rng).unwrap());
            }
            let key = key.unwrap();
            keys += 1;
            let ok = hibe::decrypt(&key, &ct).unwrap() == m
                && hibe::decrypt(&key, &sib_ct).unwrap() != m
                && key.is_consistent(&pp, &pair.pk);
            failures += usize::from(!ok);
        }
    }
    check(
        failures == 0 && keys == 2 + 4 * 2 + 8 * 4 + 16 * 8,
        format!("{} identities, {keys} delegation paths, {failures} failures", ids.len()),
    )
}

fn reference_leaves(label: NodeLabel, bits: u32, out: &mut Vec<NodeLabel>) {
    if label.is_leaf(bits) {
        out.push(label);
        return;
    }
    reference_leaves(label.child(false), bits, out);
    reference_leaves(label.child(true), bits, out);
}

fn c4_dfeval_sweep() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for n in [2u64, 4, 8, 16] {
        let mut rng = ChaCha20Rng::seed_from_u64(400 + n);
        let params = TbidsParams::setup(n, 1, &mut rng).unwrap();
        let bits = params.epoch_bits();
        let bound = (n as f64).log2().ceil() as usize + 1;
        let mut oracle = Vec::new();
        reference_leaves(NodeLabel::root(), bits, &mut oracle);

        // raw traversal from the root key
        let pp = params.hibe();
        let pair = hibe::gen(pp, &mut rng);
        let mut stack = vec![StackEntry { label: NodeLabel::root(), secret: NodeSecret::Root(pair.msk.clone()) }];
        let (mut visited, mut max_height, mut consistent) = (Vec::new(), 0, true);
        while !stack.is_empty() {
            let leaf = dfeval(pp, bits, &mut stack, &mut rng).unwrap();
            max_height = max_height.max(stack.len() + 1);
            if let NodeSecret::Node(key) = &leaf.secret {
                consistent &= key.is_consistent(pp, &pair.pk);
            }
            visited.push(leaf.label);
        }

        // the same walk through the state API
        let (_, mut state) = fs_gen(&params, &mut rng);
        let mut via_state = vec![state.labels().last().unwrap().clone()];
        let mut state_height = state.stack().len();
        while state.update(&params, &mut rng).is_ok() {
            via_state.push(state.labels().last().unwrap().clone());
            state_height = state_height.max(state.stack().len());
        }

        let good = visited == oracle && via_state == oracle && max_height <= bound && state_height <= bound && consistent;
        ok &= good;
        details.push(format!("n={n}: {} leaves, max stack {}/{bound}", visited.len(), max_height.max(state_height)));
    }
    check(ok, details.join("; "))
}

fn c5_forward_security() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(501);
    let params = TbidsParams::setup(16, 1, &mut rng).unwrap();
    let id = IdentityVector::single(b"edge.example".to_vec()).unwrap();
    let (_, mut state) = fs_gen(&params, &mut rng);
    let pp = params.hibe();
    let (mut checks, mut leaks) = (0, 0);
    for i in 0..15u64 {
        state.update(&params, &mut rng).unwrap();
        for j in 0..=i {
            checks += 1;
            // the state API refuses
            let refused = matches!(state.delegate(&params, j, &id, &mut rng), Err(Error::WrongEpoch { .. }));
            // and no held node key is an ancestor of leaf j, so no path exists
            let leaf = NodeLabel::leaf(j, params.epoch_bits()).unwrap();
            let mut target = binid(j, params.epoch_bits()).unwrap();
            target.push(b"edge.example".to_vec());
            let target = IdentityVector::new(target).unwrap();
            let unreachable = state.stack().iter().all(|entry| {
                let NodeSecret::Node(key) = &entry.secret else { return false };
                !entry.label.is_prefix_of(&leaf)
                    && matches!(
                        hibe::delegate(pp, ParentKey::Delegated(key), &target, &mut rng),
                        Err(Error::NotPrefix)
                    )
            });
            leaks += usize::from(!(refused && unreachable));
        }
    }
    let exhausted = matches!(state.update(&params, &mut rng), Err(Error::EpochsExhausted));
    check(
        leaks == 0 && checks == 120 && exhausted,
        format!("{checks} (i, j <= i) pairs, {leaks} reachable past keys"),
    )
}

fn c6_time_binding() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(601);
    let params = TbidsParams::setup(8, 1, &mut rng).unwrap();
    let id = IdentityVector::single(b"edge.example".to_vec()).unwrap();
    let (flat_pk, msk) = tbids::flat_keygen(&params, &mut rng);
    let (fs_pk, mut state) = fs_gen(&params, &mut rng);
    let mut details = Vec::new();
    let mut ok = true;
    for scheme in [SchemeKind::Flat, SchemeKind::ForwardSecure] {
        let pk = if scheme == SchemeKind::Flat { flat_pk } else { fs_pk };
        let vk = VerifyingKey { scheme, pk };
        let mut wrong = 0;
        for i in 0..8 {
            let key = match scheme {
                SchemeKind::Flat => tbids::flat_delegate(&params, &msk, i, &id, &mut rng).unwrap(),
                SchemeKind::ForwardSecure => {
                    if i > 0 {
                        state.update(&params, &mut rng).unwrap();
                    }
                    state.delegate(&params, i, &id, &mut rng).unwrap()
                }
            };
            let sig = key.sign(b"bound", &mut rng);
            for j in 0..8 {
                wrong += usize::from(tbids::verify(&params, &vk, j, &id, b"bound", &sig) != (i == j));
            }
        }
        ok &= wrong == 0;
        details.push(format!("{scheme}: 64 pairs, {wrong} wrong"));
    }
    check(ok, details.join("; "))
}

fn c7_sizes() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(701);
    let params = TbidsParams::setup(8, 1, &mut rng).unwrap();
    let (pk, msk) = tbids::flat_keygen(&params, &mut rng);
    let id = IdentityVector::single(b"a".to_vec()).unwrap();
    let sig = tbids::flat_delegate(&params, &msk, 0, &id, &mut rng).unwrap().sign(b"m", &mut rng);
    let pk_body = codec::encode(&pk).len() - codec::HEADER_LEN;
    let sig_body = codec::encode(&sig).len() - codec::HEADER_LEN;
    check(
        pk_body == 96 && (136..=152).contains(&sig_body),
        format!("public key {pk_body} bytes, signature {sig_body} bytes"),
    )
}

fn median(mut samples: Vec<Duration>) -> Duration {
    samples.sort_unstable();
    samples[samples.len() / 2]
}

fn time<F: FnMut()>(runs: usize, mut f: F) -> Duration {
    f();
    median(
        (0..runs)
            .map(|_| {
                let t = Instant::now();
                f();
                t.elapsed()
            })
            .collect(),
    )
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn c8_performance() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(801);
    let params = TbidsParams::setup(1 << 20, 1, &mut rng).unwrap();
    let id = IdentityVector::single(b"example.com".to_vec()).unwrap();
    let (flat_pk, msk) = tbids::flat_keygen(&params, &mut rng);
    let (fs_pk, state) = fs_gen(&params, &mut rng);
    let mut ok = true;
    let mut details = Vec::new();
    for scheme in [SchemeKind::Flat, SchemeKind::ForwardSecure] {
        let (pk, key) = match scheme {
            SchemeKind::Flat => (flat_pk, tbids::flat_delegate(&params, &msk, 12345, &id, &mut rng).unwrap()),
            SchemeKind::ForwardSecure => (fs_pk, state.delegate(&params, 0, &id, &mut rng).unwrap()),
        };
        let vk = VerifyingKey { scheme, pk };
        let epoch = key.epoch();
        let sign = time(51, || {
            key.sign(b"transcript hash", &mut rng);
        });
        let sig = key.sign(b"transcript hash", &mut rng);
        let verify = time(51, || {
            assert!(tbids::verify(&params, &vk, epoch, &id, b"transcript hash", &sig));
        });
        let ratio = verify.as_secs_f64() / sign.as_secs_f64();
        ok &= sign <= Duration::from_millis(10) && verify <= Duration::from_millis(25) && ratio <= 6.0;
        details.push(format!(
            "{scheme}: sign {:.2} ms, verify {:.2} ms, ratio {ratio:.2}",
            ms(sign),
            ms(verify)
        ));
    }
    check(ok, details.join("; "))
}

fn c9_precomputation() -> Outcome {
    let mut signs = Vec::new();
    let mut delegations = Vec::new();
    for depth in [2usize, 8, 16] {
        let mut rng = ChaCha20Rng::seed_from_u64(900 + depth as u64);
        let pp = hibs::setup(depth, &mut rng).unwrap();
        let pair = hibe::gen(&pp, &mut rng);
        let id = IdentityVector::new((0..depth).map(|i| vec![b'a' + i as u8])).unwrap();
        let key = hibe::delegate(&pp, ParentKey::Master(&pair.msk), &id, &mut rng).unwrap();
        let pre = hibs::precompute(&pp, &id).unwrap();
        signs.push(time(51, || {
            hibs::sign_with_precomputation(&key, &pre, b"msg", &mut rng).unwrap();
        }));
        delegations.push(time(21, || {
            hibe::delegate(&pp, ParentKey::Master(&pair.msk), &id, &mut rng).unwrap();
        }));
    }
    let lo = signs.iter().min().unwrap().as_secs_f64();
    let hi = signs.iter().max().unwrap().as_secs_f64();
    let spread = (hi - lo) / lo;
    let grows = delegations.windows(2).all(|w| w[1] > w[0]);
    let fmt = |v: &[Duration]| v.iter().map(|d| format!("{:.2}", ms(*d))).collect::<Vec<_>>().join("/");
    check(
        spread < 0.25 && grows,
        format!(
            "sign ms at l=2/8/16: {} (spread {:.1}%); delegate ms: {}",
            fmt(&signs),
            spread * 100.0,
            fmt(&delegations)
        ),
    )
}

fn c10_scenarios() -> Outcome {
    let started = Instant::now();
    let mut failed = Vec::new();
    for (name, script, expected) in BUNDLED_SCENARIOS {
        match Scenario::parse(script).and_then(|s| s.run()) {
            Ok(report) if report.to_string() == *expected => {}
            Ok(_) => failed.push(format!("{name}: report differs")),
            Err(e) => failed.push(format!("{name}: {e}")),
        }
    }
    let elapsed = started.elapsed();
    let ok = failed.is_empty() && elapsed < Duration::from_secs(60);
    check(
        ok,
        format!(
            "{} scripts, {} mismatched, {:.1}s{}",
            BUNDLED_SCENARIOS.len(),
            failed.len(),
            elapsed.as_secs_f64(),
            if failed.is_empty() { String::new() } else { format!(" ({})", failed.join(", ")) }
        ),
    )
}

/// A G1 point on the curve but outside the prime-order subgroup.
fn torsion_g1() -> G1Affine {
    let mut raw = [0u8; 48];
    raw[0] = 0x80;
    for x in 0u16.. {
        raw[46..].copy_from_slice(&x.to_be_bytes());
        if let Some(p) = Option::<G1Affine>::from(G1Affine::from_compressed_unchecked(&raw)) {
            if !bool::from(p.is_torsion_free()) {
                return p;
            }
        }
    }
    unreachable!()
}

fn torsion_g2() -> G2Affine {
    let mut raw = [0u8; 96];
    raw[0] = 0x80;
    for x in 0u16.. {
        raw[94..].copy_from_slice(&x.to_be_bytes());
        if let Some(p) = Option::<G2Affine>::from(G2Affine::from_compressed_unchecked(&raw)) {
            if !bool::from(p.is_torsion_free()) {
                return p;
            }
        }
    }
    unreachable!()
}

fn mutate(bytes: &[u8], rng: &mut ChaCha20Rng) -> Vec<u8> {
    let mut out = bytes.to_vec();
    match rng.next_u32() % 6 {
        0..=2 => {
            for _ in 0..=(rng.next_u32() % 3) {
                let i = (rng.next_u64() % out.len() as u64) as usize;
                out[i] ^= 1 + (rng.next_u32() % 255) as u8;
            }
        }
        3 => out.truncate((rng.next_u64() % out.len() as u64) as usize),
        4 => {
            let i = (rng.next_u64() % (out.len() as u64 + 1)) as usize;
            out.insert(i, rng.next_u32() as u8);
        }
        _ => {
            let i = (rng.next_u64() % out.len() as u64) as usize;
            out.remove(i);
        }
    }
    out
}

fn c11_codec_fuzz() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(1101);
    let params = TbidsParams::setup(4, 1, &mut rng).unwrap();
    let id = IdentityVector::single(b"edge".to_vec()).unwrap();
    let (pk, msk) = tbids::flat_keygen(&params, &mut rng);
    let (_, mut state) = fs_gen(&params, &mut rng);
    state.update(&params, &mut rng).unwrap();
    let key = state.delegate(&params, 1, &id, &mut rng).unwrap();
    let sig = key.sign(b"m", &mut rng);
    let seeds = [
        codec::encode(&params),
        codec::encode(&pk),
        codec::encode(&msk),
        codec::encode(&key),
        codec::encode(&state),
        codec::encode(&sig),
        codec::encode(&tbids::EpochConfig::new(10, 60, 1).unwrap()),
    ];
    let (mut decoded, mut rejected, mut violations) = (0, 0, 0);
    for i in 0..10_000 {
        let input = mutate(&seeds[i % seeds.len()], &mut rng);
        match codec::decode_any(&input) {
            Ok(obj) => {
                decoded += 1;
                let valid = obj.group_elements().iter().all(GroupElement::is_valid);
                let stable = codec::decode_any(&obj.encode()).as_ref() == Ok(&obj);
                violations += usize::from(!(valid && stable));
            }
            Err(_) => rejected += 1,
        }
    }

    // crafted non-subgroup points in both signature slots
    let mut bad_g1 = codec::encode(&sig);
    bad_g1[codec::HEADER_LEN..codec::HEADER_LEN + 48].copy_from_slice(&torsion_g1().to_compressed());
    let mut bad_g2 = codec::encode(&sig);
    bad_g2[codec::HEADER_LEN + 48..].copy_from_slice(&torsion_g2().to_compressed());
    let subgroup = codec::decode::<TbidsSignature>(&bad_g1) == Err(DecodeError::NotInSubgroup)
        && codec::decode::<TbidsSignature>(&bad_g2) == Err(DecodeError::NotInSubgroup);

    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden");
    let mut golden_files = 0;
    let mut golden_stable = true;
    for entry in std::fs::read_dir(&golden).map_err(|e| format!("{}: {e}", golden.display()))? {
        let bytes = std::fs::read(entry.map_err(|e| e.to_string())?.path()).map_err(|e| e.to_string())?;
        golden_files += 1;
        golden_stable &= codec::decode_any(&bytes).map(|o| o.encode()) == Ok(bytes);
    }
    check(
        violations == 0 && subgroup && golden_stable && golden_files > 0,
        format!(
            "10000 mutations: {decoded} decoded, {rejected} rejected, {violations} invalid; torsion points rejected: {subgroup}; {golden_files} golden files stable: {golden_stable}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("correctness", c1_correctness),
        ("cross-verifier", c2_cross_verifier),
        ("hibe brute force", c3_hibe_brute_force),
        ("dfeval sweep", c4_dfeval_sweep),
        ("forward security", c5_forward_security),
        ("time binding", c6_time_binding),
        ("sizes", c7_sizes),
        ("performance", c8_performance),
        ("precomputation", c9_precomputation),
        ("scenarios", c10_scenarios),
        ("codec fuzz", c11_codec_fuzz),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let (status, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {name:<17} {status}  {detail}  [{:.1}s]",
            i + 1,
            started.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}

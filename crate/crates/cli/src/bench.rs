use std::time::{Duration, Instant};

use rand_core::OsRng;
use tbids_core::tbids::{self, flat_delegate, flat_keygen, fs_gen};
use tbids_core::{IdentityVector, SchemeKind, TbidsParams, VerifyingKey};

use crate::error::{CliError, CliResult};

fn time<T>(iters: usize, mut f: impl FnMut() -> T) -> Vec<Duration> {
    (0..iters)
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(f());
            start.elapsed()
        })
        .collect()
}

fn report(name: &str, mut samples: Vec<Duration>) -> f64 {
    samples.sort_unstable();
    let ms = |d: Duration| d.as_secs_f64() * 1e3;
    let median = ms(samples[samples.len() / 2]);
    let mean = samples.iter().copied().map(ms).sum::<f64>() / samples.len() as f64;
    println!("{name}_median_ms={median:.4}");
    println!("{name}_mean_ms={mean:.4}");
    median
}

pub fn run(iters: usize, scheme: SchemeKind, epochs: u64, levels: usize) -> CliResult {
    if iters == 0 {
        return Err(CliError::Validation("--iters must be positive".into()));
    }
    let params = TbidsParams::setup(epochs, levels, &mut OsRng)?;
    let id = IdentityVector::new((0..levels).map(|i| format!("level{i}.example").into_bytes()))?;
    let msg = [0x5au8; 32];
    println!("scheme={scheme}");
    println!("epochs={}", params.epochs());
    println!("iters={iters}");

    let (pk, delegate): (_, Box<dyn Fn() -> tbids_core::Result<_>>) = match scheme {
        SchemeKind::Flat => {
            let (pk, msk) = flat_keygen(&params, &mut OsRng);
            let epoch = params.epochs() / 2;
            let params = &params;
            let id = &id;
            (pk, Box::new(move || flat_delegate(params, &msk, epoch, id, &mut OsRng)))
        }
        SchemeKind::ForwardSecure => {
            let (pk, state) = fs_gen(&params, &mut OsRng);
            let params = &params;
            let id = &id;
            (pk, Box::new(move || state.delegate(params, 0, id, &mut OsRng)))
        }
    };
    report("delegate", time(iters, &delegate));
    let key = delegate()?;
    let sign = report("sign", time(iters, || key.sign(&msg, &mut OsRng)));
    let sig = key.sign(&msg, &mut OsRng);
    let vk = VerifyingKey { scheme, pk };
    let verify = report(
        "verify",
        time(iters, || tbids::verify(&params, &vk, key.epoch(), &id, &msg, &sig)),
    );
    println!("verify_sign_ratio={:.3}", verify / sign);
    Ok(())
}

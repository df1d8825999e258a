//! Direct windowed sum versus FFT convolution for one slice.

use lightcone::error::Result;
use lightcone::experiments::bench;

fn main() -> Result<()> {
    let rows = bench(&[256, 4096, 1 << 14], &[16, 64, 256], 3, 7)?;
    println!(
        "{:>6} {:>4} {:>11} {:>11} {:>8} {:>9}",
        "N", "W", "direct ms", "fft ms", "speedup", "rel diff"
    );
    for r in rows {
        println!(
            "{:>6} {:>4} {:>11.3} {:>11.3} {:>8.2} {:>9.1e}",
            r.n,
            r.w,
            1e3 * r.direct_s,
            1e3 * r.fft_s,
            r.speedup(),
            r.rel_diff
        );
    }
    Ok(())
}

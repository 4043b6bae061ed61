use cbcc::bandit::{HyperParams, PolicyKind};
use cbcc::numerics::RngStream;
use std::time::Instant;
fn main() {
    let hyper = HyperParams::default();
    let mut rng = RngStream::new(3);
    let ds = cbcc::synthetic::sparse_classification("x", cbcc::synthetic::SparseClassSpec::document_like(1080, 857, 9), &mut rng).unwrap();
    for kind in [PolicyKind::Cmab, PolicyKind::Tscc] {
        let mut p = kind.build(9, 857, &hyper, RngStream::new(1)).unwrap();
        let t0 = Instant::now();
        let mut err = 0;
        for t in 0..2000 { let c = ds.row(t % 1080); let d = p.select(c).unwrap(); let r = u8::from(d.arm == ds.label(t%1080)); err += 1 - r as u32; p.update(c, d, r).unwrap(); }
        println!("{kind}: {:?} per 2000 rounds, err {err}", t0.elapsed());
    }
}

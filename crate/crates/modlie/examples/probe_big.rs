use modlie::cartan::{contact, melikian, contact_scalar_grading};
use modlie::cohomology::{restricted_h2, h1};
use modlie::field::PrimeField;
use std::time::Instant;

fn main() {
    let f = PrimeField::new(5).unwrap();
    let m = melikian(1, 1, f).unwrap();
    let rl = m.restricted().unwrap();
    let t0 = Instant::now();
    let rep = restricted_h2(&rl, Some(&m.grading)).unwrap();
    println!("M(1,1) h2* = {} in {:?}", rep.dimension, t0.elapsed());
    for (c, d) in &rep.by_class { println!("  class {:?}: {}", c, d); }

    let k = contact(3, &[1, 1, 1], f).unwrap();
    let krl = k.restricted().unwrap();
    let t0 = Instant::now();
    let r1 = h1(&k.lie, Some(&k.grading)).unwrap();
    println!("K(3;1) h1 = {} in {:?}", r1.dimension, t0.elapsed());
    let t0 = Instant::now();
    let rep = restricted_h2(&krl, Some(&k.grading)).unwrap();
    println!("K(3;1) h2* = {} in {:?}", rep.dimension, t0.elapsed());
    for (c, d) in &rep.by_class { println!("  class {:?}: {}", c, d); }
    let _ = contact_scalar_grading;
}

//! Generates the synthetic ordering task, writes it as JSON and reads it back.
//!
//! cargo run --example generate_dataset -- [out.json] [seed]

use mtgat::seqdata::{gen_synthetic, load_dataset, save_dataset, ModalityKind, Split, SyntheticSpec};

fn main() -> mtgat::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().unwrap_or_else(|| "synthetic.json".into());
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    let data = gen_synthetic(&SyntheticSpec::default(), seed)?;
    save_dataset(&data, &out)?;
    let back = load_dataset(&out)?;
    assert_eq!(back, data);

    for split in [Split::Train, Split::Val, Split::Test] {
        let samples = data.split(split);
        let positive = samples
            .iter()
            .filter(|s| matches!(s.label, mtgat::seqdata::TaskLabel::Regression(y) if y > 0.0))
            .count();
        println!("{:<5} {:>4} samples, {positive} labelled +2", split.name(), samples.len());
    }
    let s = &data.samples()[0];
    let meta = s.meta.as_ref().expect("synthetic samples carry trigger positions");
    println!(
        "{}: lengths {:?}, text trigger at {}, video trigger at {}, label {:?}",
        s.id,
        s.lengths(),
        meta["text_trigger"],
        meta["video_trigger"],
        s.label
    );
    let t = meta["text_trigger"].as_u64().unwrap() as usize;
    println!("text row {t}: {:?}", s.sequence(ModalityKind::Text).row(t));
    println!("wrote {out}");
    Ok(())
}

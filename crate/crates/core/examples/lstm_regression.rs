//! Trains the sequence regressor on synthetic halves and prints the
//! learning curve.
//!
//!     cargo run --release --example lstm_regression -- [epochs]

use schema_hardness::eval::evaluate;
use schema_hardness::lstm::{LstmModel, TrainConfig};
use schema_hardness::schema::split_train_test;
use schema_hardness::synthetic::synthetic_dataset;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let epochs = std::env::args().nth(1).map_or(Ok(20), |s| s.parse())?;
    let data = synthetic_dataset(400, 2, "seq");
    let (train, test) = split_train_test(&data, 0.25, 2)?;
    let cfg = TrainConfig { epochs, ..Default::default() };
    let (model, history) = LstmModel::fit_halves(&train.halves, &cfg)?;
    print!("{}", history.to_csv());
    let report = evaluate(&model, &test, None, None)?;
    println!("held out: {}", report.to_json());
    Ok(())
}

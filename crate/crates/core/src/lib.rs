//! Measuring echo chambers and filter bubbles in recommender interaction logs.
//!
//! Users are split by how often they click inside recommendation pages
//! (page-view ratio) into a *following* and an *ignoring* cohort. Each
//! user's browse, click and purchase history is cut into fixed-size blocks,
//! and every block is embedded as the mean of its items' embeddings. The
//! first and last block of every user are then compared:
//!
//! * clustering tendency of the user embeddings (Hopkins statistic);
//! * reinforcement of interests, as the drop in Calinski-Harabasz score
//!   under fixed first-block cluster labels and as the adjusted Rand index
//!   between first- and last-block partitions, around a BIC-selected K*;
//! * narrowing of exposure, as the mean pairwise distance of browsed items.
//!
//! Every measurement is repeated on resampled cohorts and the repetition
//! values are compared with Welch t-tests.
//!
//! The modules follow the data flow: [`logmodel`] → [`cohort`] → [`blocks`]
//! → [`embed`] → [`cluster`] → [`experiment`], wired together by
//! [`pipeline`] and written out by [`render`]. [`synth`] generates logs with
//! known dynamics.
//!
//! The `examples/` directory has one runnable program per capability, e.g.
//! `cargo run --release --example end_to_end`.

pub mod blocks;
pub mod cli;
pub mod cluster;
pub mod cohort;
pub mod embed;
pub mod error;
pub mod experiment;
pub mod logmodel;
pub mod pipeline;
pub mod render;
pub mod seed;
pub mod synth;

pub use error::{Error, Result};

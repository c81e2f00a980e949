//! Finite crossed modules and the structures built from them: categorical
//! groups, the quintet double groupoid, strict 2-group actions on finite
//! categories and their transformation double categories.
//!
//! Every structure is stored as explicit tables indexed by `usize`, and every
//! law has a checker that returns a [`report::Report`] of located failures.

pub mod report;

pub mod action;
pub mod catalog;
pub mod catgroup;
pub mod config;
pub mod fincat;
pub mod formats;
pub mod groups;
pub mod quintet;
pub mod transform;
pub mod xmod;

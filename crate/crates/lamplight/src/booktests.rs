//! Keeps the guide honest: every chapter of the book is included here as
//! documentation, so its fenced Rust snippets run under `cargo test`.
#![cfg(doctest)]

macro_rules! chapter {
    ($name:ident, $path:literal) => {
        #[doc = include_str!($path)]
        mod $name {}
    };
}

chapter!(graphs_and_windows, "../../../book/src/graphs-and-windows.md");
chapter!(lamplighter_distances, "../../../book/src/lamplighter-distances.md");
chapter!(coarse_homotopy, "../../../book/src/coarse-homotopy.md");
chapter!(leaves_and_squares, "../../../book/src/leaves-and-squares.md");
chapter!(amenability, "../../../book/src/amenability.md");
chapter!(aptolic_maps, "../../../book/src/aptolic-maps.md");

//! Matrix files: the FFPM binary layout, CSV, and the errors each reports.
//!
//!     cargo run --example matrix_files

use ffp::dataio::{decode_ffpm, encode_csv, encode_ffpm, parse_csv, read_matrix, write_matrix};
use ffp::DenseMatrix;

fn main() -> ffp::Result<()> {
    let m = DenseMatrix::from_row_major(2, 3, vec![1.0, -0.0, 0.1, 1e-300, 2.5, -7.0])?;
    let bytes = encode_ffpm(&m);
    println!("FFPM: {} bytes, header {:02x?}", bytes.len(), &bytes[..21]);
    let back = decode_ffpm(&bytes)?;
    let exact = back.to_row_major().iter().zip(m.to_row_major()).all(|(a, b)| a.to_bits() == b.to_bits());
    println!("bit-exact round trip: {exact}");

    let mut truncated = bytes.clone();
    truncated.truncate(40);
    println!("truncated file: {}", decode_ffpm(&truncated).unwrap_err());
    let mut bad = bytes;
    bad[0] = b'X';
    println!("bad magic:      {}", decode_ffpm(&bad).unwrap_err());

    println!("\nCSV:\n{}", encode_csv(&m));
    println!("ragged CSV:     {}", parse_csv("1,2\n3\n").unwrap_err());
    println!("bad cell:       {}", parse_csv("1,2\n3,x\n").unwrap_err());

    let dir = std::env::temp_dir().join("ffp_matrix_files_demo");
    std::fs::create_dir_all(&dir)?;
    for name in ["m.ffpm", "m.csv"] {
        let path = dir.join(name);
        write_matrix(&path, &m)?;
        println!("{} -> {:?}", path.display(), read_matrix(&path)?.shape());
    }
    Ok(())
}

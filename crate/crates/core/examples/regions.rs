use ambec::{regions, sweep, BackendSelection, Grid, Params, SweepOptions};

fn main() -> ambec::Result<()> {
    let p = Params::real(100.0, 1e4, 5.0, 2.0)?;
    let grid = Grid::uniform(0.5, 200)?;
    let kinds = ["VarXa".parse()?, "HZ1".parse()?];
    let opts = SweepOptions { backend: BackendSelection::Both, ..Default::default() };
    for series in sweep(&p, &grid, &kinds, &opts)? {
        println!("{} {}: {:?}", series.kind, series.backend, regions(&series).intervals);
    }
    Ok(())
}

//! Grid minigames: a random game at distance 6, its minimal path, and a
//! balanced set of instructed games.

use myotrain::classifier::Outcome;
use myotrain::session::{
    apply_outcome, generate_balanced_games, generate_game, GridConfig, GAME_DISTANCE,
};
use rand::SeedableRng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let grid = GridConfig::default();
    let mut game = generate_game(&mut rng, &grid, GAME_DISTANCE)?;
    println!("avatar {:?}\ntarget {:?}", game.avatar, game.target);
    let path = game.minimal_path();
    println!("minimal path: {path:?}");
    for g in path {
        let (next, effect) = apply_outcome(&game, Outcome::Label(g));
        println!("{g:<6} -> {effect:?}, {} left", next.remaining());
        game = next;
    }
    assert!(game.is_complete());

    let games = generate_balanced_games(&mut rng, &grid, 4, GAME_DISTANCE)?;
    let mut counts = [0; 9];
    for g in &games {
        for m in &g.gestures {
            counts[m.index()] += 1;
        }
    }
    println!("balanced instructed games, moves per gesture: {counts:?}");
    Ok(())
}

package corpus;

import java.io.BufferedReader;
import java.io.IOException;
import java.io.Reader;
import java.util.List;
import java.util.Map;
import java.util.function.Function;

public class Branches {

  public int straight(int a) {
    int b = a * 2;
    return b + 1;
  }

  public int ifAndLoop(List<Integer> xs) {
    int total = 0;
    if (xs.isEmpty()) {
      total = -1;
    } else {
      total = 0;
    }
    for (int x : xs) {
      total += x;
    }
    return total;
  }

  public String classify(int code) {
    return switch (code) {
      case 200, 201 -> "ok";
      case 404 -> "missing";
      default -> code >= 500 && code < 600 ? "server" : "other";
    };
  }

  public int labeled(int[][] grid) {
    int hits = 0;
    outer:
    for (int i = 0; i < grid.length; i++) {
      for (int j = 0; j < grid[i].length; j++) {
        if (grid[i][j] < 0) continue outer;
        if (grid[i][j] == 0 || grid[i][j] > 9) break outer;
        hits++;
      }
    }
    do {
      hits--;
    } while (hits > 100);
    return hits;
  }

  public String read(Reader r) {
    try (BufferedReader in = new BufferedReader(r)) {
      String line = in.readLine();
      return line == null ? "" : line;
    } catch (IOException | RuntimeException e) {
      return "error";
    } finally {
      System.out.flush();
    }
  }

  public Function<Integer, Integer> lambdas(Map<String, ? extends Number> m) {
    Runnable r = new Runnable() {
      @Override
      public void run() {
        while (m.isEmpty() && m != null) {
          break;
        }
      }
    };
    r.run();
    return x -> {
      if (x > 0) {
        return x;
      }
      return x < -10 ? -x : (x == 0 ? 1 : x);
    };
  }

  public int oldSwitch(String s, boolean a, boolean b) {
    int v = 0;
    switch (s) {
      case "a":
        v = 1;
        break;
      case "b":
      case "c":
        v = a || b ? 2 : 3;
        break;
      default:
        v = 4;
    }
    String msg = "if (fake) while && || ? case";
    char q = '?';
    // if (comment) && ||
    /* for (;;) case */
    return v + msg.length() + q;
  }

  public <T extends Comparable<? super T>> T generic(List<? extends T> xs) {
    T best = null;
    for (T x : xs) {
      if (best == null || x.compareTo(best) > 0) {
        best = x;
      }
    }
    return best;
  }
}

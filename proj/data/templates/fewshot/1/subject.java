package demo.inventory;

import java.util.HashMap;
import java.util.Map;

public class StockLedger {
  private final Map<String, Integer> levels = new HashMap<>();
  private final int reorderThreshold;

  public StockLedger(int reorderThreshold) {
    if (reorderThreshold < 0) throw new IllegalArgumentException("threshold");
    this.reorderThreshold = reorderThreshold;
  }

  public void receive(String sku, int quantity) {
    if (quantity <= 0) throw new IllegalArgumentException("quantity");
    levels.merge(sku, quantity, Integer::sum);
  }

  public boolean reserve(String sku, int quantity) {
    int current = available(sku);
    if (quantity > current) return false;
    levels.put(sku, current - quantity);
    return true;
  }

  public int available(String sku) {
    return levels.getOrDefault(sku, 0);
  }

  public boolean needsReorder(String sku) {
    return available(sku) <= reorderThreshold;
  }
}

package demo.billing;

import java.util.Map;

public class RateTable {
  private final Map<String, Integer> basisPoints;

  public RateTable(Map<String, Integer> basisPoints) {
    this.basisPoints = Map.copyOf(basisPoints);
  }

  public int rateFor(String region) {
    Integer rate = basisPoints.get(region);
    if (rate == null) throw new IllegalArgumentException("unknown region " + region);
    return rate;
  }

  public long taxCents(String region, long netCents) {
    if (netCents < 0) throw new IllegalArgumentException("negative amount");
    long scaled = netCents * rateFor(region);
    return (scaled + 5_000) / 10_000;
  }

  public boolean isTaxFree(String region) {
    return basisPoints.containsKey(region) && basisPoints.get(region) == 0;
  }
}
